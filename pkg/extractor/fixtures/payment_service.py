class PaymentService:
    def __init__(self, gateway, auditor, logger):
        self._gateway = gateway
        self._auditor = auditor
        self._logger = logger
        self._audit("payment_init")

    def charge(self, user_id: str, amount: float, currency="EUR") -> bool:
        ok = self._gateway.authorize(user_id, amount, currency)
        self._audit(f"authorize:{user_id}:{amount}:{ok}")
        if not ok:
            return False
        ok = self._gateway.capture(user_id, amount, currency)
        self._audit(f"capture:{user_id}:{amount}:{ok}")
        return ok

    def refund(self, user_id: str, amount: float, currency="EUR") -> bool:
        ok = self._gateway.refund(user_id, amount, currency)
        self._audit(f"refund:{user_id}:{amount}:{ok}")
        return ok

    def _audit(self, msg: str) -> None:
        self._auditor.record(msg)
        self._logger.info(f"[PAY] {msg}")
