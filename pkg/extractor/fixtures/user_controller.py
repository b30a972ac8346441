class UserController:
    def __init__(self, auth_manager, user_repo, logger):
        self.auth_manager = auth_manager
        self.user_repo = user_repo
        self._logger = logger

    def register(self, username, password):
        self.user_repo.save_user(username, password)
        self._logger.info(f"Registered {username}")

    def login(self, username, password):
        return self.auth_manager.login(username, password)

    def logout(self):
        self.auth_manager.logout()
