from unittest.mock import MagicMock


def fake_ray() -> MagicMock:
    """Stand-in for ray whose remote calls run eagerly in this process."""
    ray = MagicMock()

    def remote(func):
        wrapped = MagicMock()
        wrapped.remote.side_effect = func
        return wrapped

    ray.remote.side_effect = remote
    ray.get.side_effect = lambda refs: list(refs)
    return ray
