class UserRepository:
    def __init__(self, backend, hasher, logger):
        self.backend = backend
        self.hasher = hasher
        self._logger = logger

    def get_user(self, username: str):
        self._logger.debug(f"fetch:{username}")
        return self.backend.get(username)

    def save_user(self, username: str, password: str) -> None:
        hpw = self.hasher(password)
        self.backend[username] = {"hpw": hpw}
        self._logger.info(f"saved:{username}")

    def verify(self, username: str, hashed_password: str) -> bool:
        rec = self.get_user(username)
        ok = bool(rec and rec.get("hpw") == hashed_password)
        self._logger.debug(f"verify:{username}:{ok}")
        return ok
