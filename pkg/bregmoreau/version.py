from importlib.metadata import version


try:
    __version__ = version('bregmoreau')
except Exception:
    # Package is installed from source. It's at least this version
    __version__ = "0.1.0-uninstalled"
