import logging


class AppLogger:
    def __init__(self, name="app"):
        self._logger = logging.getLogger(name)
        handler = logging.StreamHandler()
        fmt = logging.Formatter("[%(name)s] %(levelname)s: %(message)s")
        handler.setFormatter(fmt)
        self._logger.addHandler(handler)
        self._logger.setLevel(logging.INFO)

    def info(self, msg): self._logger.info(msg)
    def debug(self, msg): self._logger.debug(msg)
    def error(self, msg): self._logger.error(msg)
