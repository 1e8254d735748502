__version__ = "0.1.0"
__author__ = "phonon-diffusion developers"
__email__ = "phonon-diffusion@users.noreply.github.com"
