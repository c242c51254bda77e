"""dickesim - simulation and analysis toolkit for six-photon Dicke state experiments."""

from dotenv import load_dotenv

from dickesim._version import __version__

__all__ = ["__version__"]

load_dotenv()
