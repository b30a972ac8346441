class AuthManager:
    def __init__(self, user_store, logger):
        self.user_store = user_store
        self.session = None
        self._logger = logger
        self._log_event("auth_init")

    def login(self, username: str, password: str) -> bool:
        hashed = self._hash_password(password)
        if self.user_store.verify(username, hashed):
            self.session = {"user": username}
            self._log_event("login_ok")
            return True
        self._log_event("login_fail")
        return False

    def logout(self) -> None:
        self.session = None
        self._log_event("logout")

    def is_authenticated(self) -> bool:
        return self.session is not None

    def _hash_password(self, raw: str) -> str:
        return "h$" + raw[::-1]

    def _log_event(self, msg: str) -> None:
        self._logger.info(f"[AUTH] {msg}")
