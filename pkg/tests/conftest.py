import dataclasses

import pytest
from hypothesis import settings

from rainuav import config, medium, radiomap

settings.register_profile("default", deadline=None)
settings.load_profile("default")


def toy_scenario(rain_rate=25.0, form=medium.TEXTBOOK, **changes):
    """The bundled 1 km toy scenario with a different rain rate or polarizability form."""
    base = config.load_bundled("toy20").build_scenario()
    rain = dataclasses.replace(base.medium, rain_rate=rain_rate)
    return dataclasses.replace(base, medium=rain, polarizability=form, **changes)


@pytest.fixture(scope="session")
def toy_config():
    return config.load_bundled("toy20")


@pytest.fixture(scope="session")
def toy_map():
    return radiomap.build_rss_map(toy_scenario())


ACCEPTANCE_LINES: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=lambda k: (len(k), k)):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
