# https://github.com/python-poetry/poetry/pull/2366#issuecomment-652418094
from importlib import metadata

__version__ = metadata.version(__name__)

from .algos import *
from .models import *
from .primes import *
from .stats import *
from .tasks import sieve_segment, summarize_segment
from .walk import *
