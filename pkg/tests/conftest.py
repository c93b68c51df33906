import pytest

from superquant_toolkit.cones import service as cones_service
from superquant_toolkit.possys import service as possys_service
from superquant_toolkit.rootdata.service import AlgebraSpec


@pytest.fixture(scope="session")
def su11_ctx():
    return possys_service.build_context(AlgebraSpec("A", 1, 0), "su(1,1|1)")


@pytest.fixture(scope="session")
def su211_ctx():
    return possys_service.build_context(AlgebraSpec("A", 2, 0), "su(2,1|1)")


@pytest.fixture(scope="session")
def b11_ctx():
    return possys_service.build_context(AlgebraSpec("B", 1, 1), "so(3)+sp(1,R)")


@pytest.fixture(scope="session")
def su211_cells(su211_ctx):
    ctx = su211_ctx
    return cones_service.cells(ctx.ps, ctx.rs, ctx.rf)


@pytest.fixture(scope="session")
def su11_cell(su11_ctx):
    ctx = su11_ctx
    (cell,) = cones_service.cells(ctx.ps, ctx.rs, ctx.rf)
    return cell
