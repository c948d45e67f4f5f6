import pytest

from clpkernel import make_engine


@pytest.fixture
def engine():
    return make_engine()


@pytest.fixture
def ask(engine):
    def run(text, limit=None):
        return engine.ask(text, limit=limit)
    return run


@pytest.fixture
def first(engine):
    """Run a query and return the first Answer, or None."""
    def run(text):
        return engine.once(text)
    return run


@pytest.fixture
def fmt(engine):
    return engine.format_term
