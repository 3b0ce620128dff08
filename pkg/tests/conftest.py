# tests/conftest.py
from pathlib import Path

import pytest

from stefanctl.models.gains import ControlGains
from stefanctl.models.physical import InitialData, LinearProfile, PhysicalParams
from stefanctl.models.solver import SolverConfig

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"

# Zinc
RHO = 6570.0
CP = 389.5
LATENT = 111961.0
K_ZINC = 116.0
T_MELT = 692.68
ALPHA = K_ZINC / (RHO * CP)
BETA = K_ZINC / (RHO * LATENT)


def zinc(**relaxations) -> PhysicalParams:
    return PhysicalParams(alpha=ALPHA, beta=BETA, k_cond=K_ZINC, t_melt=T_MELT, length=0.5, **relaxations)


@pytest.fixture
def params2() -> PhysicalParams:
    return zinc(epsilon=20.0)


@pytest.fixture
def params3() -> PhysicalParams:
    return zinc(epsilon1=10.0, epsilon2=10.0)


@pytest.fixture
def data2() -> InitialData:
    return InitialData(s0=0.1, v0=0.0, profile=LinearProfile(surplus=10.0))


@pytest.fixture
def data3() -> InitialData:
    return InitialData(s0=0.1, v0=0.0, a0=0.0, profile=LinearProfile(surplus=10.0))


@pytest.fixture
def gains2() -> ControlGains:
    return ControlGains(c1=0.1, c2=0.2, s_r=0.2)


@pytest.fixture
def gains3() -> ControlGains:
    return ControlGains(c1=0.1, c2=0.2, c3=0.25, s_r=0.2)


@pytest.fixture
def coarse() -> SolverConfig:
    return SolverConfig(nx=32, dt=1.0, t_final=3000.0)


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR
