from . import test_num
from . import test_constitutive
from . import test_dispersion
from . import test_projection
from . import test_localfield
from . import test_emission
from . import test_wwsim
from . import test_cli
from . import test_misc
