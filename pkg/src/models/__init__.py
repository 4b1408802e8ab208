from .basis import *
from .moments import *
from .closure import *
from .collision import *
from .eigen import *
from .problem import *
from .mesh import *
from .pn import *
