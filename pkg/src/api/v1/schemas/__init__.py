from .moments import *
from .closure import *
from .eigen import *
