class InMemoryCache:
    def __init__(self, max_items=100):
        self._store = {}
        self._max_items = max_items

    def get(self, key):
        return self._store.get(key)

    def set(self, key, value):
        if len(self._store) >= self._max_items:
            self._evict()
        self._store[key] = value

    def clear(self):
        self._store.clear()

    def _evict(self):
        # naive eviction: remove first key
        k = next(iter(self._store))
        del self._store[k]
