from dataclasses import dataclass, fields, replace


@dataclass(frozen=True)
class Tolerances:
    herm: float = 1e-9  # max |M - M^dagger| entry
    tr: float = 1e-9  # |trace - 1|, also sum of spectra / weights
    psd: float = 1e-9  # allowed negative eigenvalue
    eig: float = 1e-8  # eigen-residuals and reconstruction checks
    orth: float = 1e-8  # orthonormality of bases
    maj: float = 1e-10  # slack on majorization and compatibility inequalities
    boundary: float = 1e-9  # inputs this far outside a region are projected onto it

    def with_overrides(self, **kwargs):
        known = {f.name for f in fields(self)}
        unknown = set(kwargs) - known
        if unknown:
            raise KeyError(f"unknown tolerance(s): {sorted(unknown)}")
        return replace(self, **{k: float(v) for k, v in kwargs.items()})


DEFAULT_TOL = Tolerances()
