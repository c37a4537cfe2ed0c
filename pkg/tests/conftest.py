import os

import pytest

os.environ["CERTIFIER_HTML_LOG"] = "false"

from certifier import CertifierConfig  # noqa: E402
from python.helpers import runtime  # noqa: E402
from python.helpers.lambda_mod import ModulePresentation, TruncAlgebra  # noqa: E402
from python.helpers.print_style import PrintStyle  # noqa: E402

PrintStyle.html_enabled = False

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture(autouse=True)
def fresh_runtime_args():
    runtime.args = {}
    yield
    runtime.args = {}


@pytest.fixture
def config(tmp_path) -> CertifierConfig:
    return CertifierConfig(cache_dir=str(tmp_path / "certificates"))


@pytest.fixture
def lambda_p_t1() -> ModulePresentation:
    with open(fixture_path("lambda_p_t1.json"), encoding="utf-8") as f:
        return ModulePresentation.from_json(f.read())


@pytest.fixture
def lambda_t1_minus_p() -> ModulePresentation:
    with open(fixture_path("lambda_t1_minus_p.json"), encoding="utf-8") as f:
        return ModulePresentation.from_json(f.read())


@pytest.fixture
def algebra_r2() -> TruncAlgebra:
    return TruncAlgebra(p=3, N=2, r=2, D=4)
