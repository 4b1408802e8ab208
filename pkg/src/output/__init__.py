from .sink import *
from .csv_sink import *
from .memory_sink import *
