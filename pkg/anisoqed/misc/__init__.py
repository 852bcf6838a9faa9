from . import sphere
from . import testmedia
from . import dataframe
from . import diagnosis
