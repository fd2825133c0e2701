import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

import networkx as nx
import numpy as np

from src.utils.helpers import save_to_file

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Link:
    """Связь source(t - lag) -> target(t) с коэффициентом."""

    source: int
    target: int
    lag: int
    coefficient: float


@dataclass
class SvarModel:
    """
    Линейная структурная векторная авторегрессия.

    Каждая переменная равна сумме вкладов своих связей и независимого
    гауссовского шума с масштабом noise_scale.
    """

    n_total: int
    tau: int
    links: List[Link]
    latent: Tuple[int, ...] = ()
    noise_scale: List[float] = field(default_factory=list)

    def __post_init__(self):
        self.latent = tuple(sorted(self.latent))
        if not self.noise_scale:
            self.noise_scale = [1.0] * self.n_total
        for link in self.links:
            if not (0 <= link.source < self.n_total and 0 <= link.target < self.n_total):
                raise ValueError(f"Связь {link} ссылается на несуществующую переменную")
            if not 0 <= link.lag <= self.tau:
                raise ValueError(f"Лаг связи {link} вне диапазона [0, {self.tau}]")
            if link.lag == 0 and link.source == link.target:
                raise ValueError(f"Одновременная петля {link}")
        if not nx.is_directed_acyclic_graph(self.contemporaneous_graph()):
            raise ValueError("Одновременные связи образуют цикл")

    @property
    def observed(self) -> List[int]:
        hidden = set(self.latent)
        return [v for v in range(self.n_total) if v not in hidden]

    def contemporaneous_graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n_total))
        graph.add_edges_from((l.source, l.target) for l in self.links if l.lag == 0)
        return graph

    def coefficient_matrices(self) -> np.ndarray:
        """Массив A формы (tau + 1, n, n), A[k][target, source] - коэффициент связи с лагом k."""
        matrices = np.zeros((self.tau + 1, self.n_total, self.n_total))
        for link in self.links:
            matrices[link.lag, link.target, link.source] += link.coefficient
        return matrices

    def companion_matrix(self) -> np.ndarray:
        """Сопровождающая матрица приведенной формы (I - A0)^-1 A_k."""
        matrices = self.coefficient_matrices()
        n = self.n_total
        inverse = np.linalg.inv(np.eye(n) - matrices[0])
        if self.tau == 0:
            return np.zeros((n, n))
        companion = np.zeros((n * self.tau, n * self.tau))
        for k in range(1, self.tau + 1):
            companion[:n, (k - 1) * n:k * n] = inverse @ matrices[k]
        if self.tau > 1:
            companion[n:, :-n] = np.eye(n * (self.tau - 1))
        return companion

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.companion_matrix()))))

    def is_stationary(self) -> bool:
        return self.spectral_radius() < 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n_total': self.n_total,
            'tau': self.tau,
            'latent': list(self.latent),
            'noise_scale': list(self.noise_scale),
            'links': [asdict(link) for link in self.links],
        }

    @classmethod
    def from_dict(cls, model_dict: Dict[str, Any]) -> "SvarModel":
        return cls(
            n_total=model_dict['n_total'],
            tau=model_dict['tau'],
            links=[Link(**link) for link in model_dict['links']],
            latent=tuple(model_dict.get('latent', ())),
            noise_scale=list(model_dict.get('noise_scale', [])),
        )

    def to_text(self) -> str:
        """Текстовое описание: список связей с коэффициентами и блок JSON."""
        lines = [f"# variables: {self.n_total}", f"# order: {self.tau}",
                 f"# latent: {' '.join(f'V{v}' for v in self.latent) or '-'}"]
        for link in sorted(self.links, key=lambda l: (l.target, l.lag, l.source)):
            lines.append(f"V{link.source}(t-{link.lag}) -> V{link.target}(t): {link.coefficient:+.6f}")
        return "\n".join(lines) + "\n"

    def save_to_file(self, filename: str) -> None:
        """
        Сохраняет модель в файл JSON.

        Args:
            filename: Имя файла
        """
        save_to_file(json.dumps(self.to_dict(), indent=4) + "\n", filename)

    @classmethod
    def load_from_file(cls, filename: str) -> "SvarModel":
        with open(filename, 'r', encoding='utf-8') as f:
            return cls.from_dict(json.load(f))
