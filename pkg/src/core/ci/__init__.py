from src.core.ci.base import CITest, CiRecord, InsufficientSamplesError
from src.core.ci.counting import CachedTest, CountingTest
from src.core.ci.dataset import Dataset, window_embed
from src.core.ci.factory import CITestFactory
from src.core.ci.fisher_z import FisherZTest, fisher_z_pvalue
from src.core.ci.g_square import GSquareTest, g_square_statistic
from src.core.ci.oracle import OracleTest
