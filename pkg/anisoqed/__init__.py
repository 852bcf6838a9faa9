try:
    from importlib.metadata import version as _version, PackageNotFoundError

    __version__ = _version("anisoqed")
except PackageNotFoundError:
    __version__ = "0.1.0"

from . import num
from . import errors
from . import constitutive
from . import dispersion
from . import projection
from . import misc
from . import localfield
from . import emission
from . import wwsim
