from .basis import *
from .mixins import *
from .realizability import *
from .closure import *
from .collision import *
from .eigen import *
from .fvsolver import *
from .pn import *
from .bench import *
