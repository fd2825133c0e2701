import logging
from typing import FrozenSet, Hashable

from src.core.ci.base import CITest, CiRecord
from src.core.graph import Mag
from src.core.separation import m_separated

logger = logging.getLogger(__name__)


class OracleTest(CITest):
    """Идеальная проверка: m-разделение в известном MAG окна."""

    name = "oracle"

    def __init__(self, mag: Mag):
        super().__init__()
        self.mag = mag

    def test(self, x: Hashable, y: Hashable, z: FrozenSet[Hashable]) -> CiRecord:
        independent = m_separated(self.mag, x, y, z)
        return CiRecord(x, y, z, None, independent)
