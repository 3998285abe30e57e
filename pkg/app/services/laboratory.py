"""
Laboratory Service
Builds and caches the numerical contexts (atlas, modulation, families) for a run configuration
"""

import sys
from typing import Dict, Optional, Tuple

from app.cocycles.families import AssembledCocycle, BFamily, HermanParams, herman, make_family
from app.cocycles.engine import CocycleSpec
from app.core.alpha import AlphaSpec
from app.models import RunConfig
from app.sturmian.gaps import GapAtlas, get_gap_atlas
from app.sturmian.modulation import ModulationContext


class Laboratory:
    """Service for everything a command needs from one validated RunConfig"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.alpha: AlphaSpec = config.alpha_spec
        if self.alpha.unsafe:
            print(f"[Laboratory] WARNING: alpha {config.alpha!r} is {self.alpha.unsafe}", file=sys.stderr)
        self.atlas: GapAtlas = get_gap_atlas(self.alpha, config.precision)
        if config.gamma is not None:
            self.herman_params = HermanParams.from_gamma(config.gamma, self.alpha)
        else:
            self.herman_params = HermanParams.from_c(config.exponent, self.alpha)
        self._modulation: Optional[ModulationContext] = None
        self._assembled: Dict[Tuple[str, bool], AssembledCocycle] = {}

    @property
    def staircase(self):
        return self.atlas.staircase

    @property
    def modulation(self) -> ModulationContext:
        if self._modulation is None:
            self._modulation = ModulationContext(
                self.atlas,
                epsilon=self.config.epsilon,
                depth=self.config.depth,
                classify_depth=self.config.classify_depth,
            )
        return self._modulation

    @property
    def herman(self) -> CocycleSpec:
        return herman(self.herman_params)

    def family(self, kind: Optional[str] = None) -> BFamily:
        return make_family(kind or self.config.family, self.herman_params, self.modulation)

    def assembled(self, kind: Optional[str] = None, modulated: Optional[bool] = None) -> AssembledCocycle:
        """Assembled cocycle for a family kind; cached so table extensions persist"""
        kind = kind or self.config.family
        modulated = self.config.modulated if modulated is None else modulated
        key = (kind, modulated)
        if key not in self._assembled:
            self._assembled[key] = AssembledCocycle(self.family(kind), modulated=modulated)
        return self._assembled[key]


_laboratories: Dict[str, Laboratory] = {}


def get_laboratory(config: RunConfig) -> Laboratory:
    """Get or create the laboratory for a configuration"""
    key = config.model_dump_json(exclude={"out", "format", "workers", "seed", "iters", "samples"})
    if key not in _laboratories:
        _laboratories[key] = Laboratory(config)
    return _laboratories[key]
