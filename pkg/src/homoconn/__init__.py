"""homoconn: SU(n+1)-invariant affine connections on odd-dimensional spheres."""

__version__ = "0.1.0"
