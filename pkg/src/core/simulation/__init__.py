from src.core.simulation.model import Link, SvarModel
from src.core.simulation.sampler import (ModelSamplingError, SimulationParams, binarize,
                                         export_ground_truth, sample_model, simulate)
