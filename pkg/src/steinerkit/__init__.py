"""steinerkit: 2-(v,k,1) designs with prescribed automorphism groups.

Construction routes: difference-family base designs on a prime number of
points, line-filling of affine spaces AG(d,p) in a group-invariant manner,
transversal-design products, and prescribed-group exact-cover search.  Every
produced object is verified exhaustively against the design axioms.
"""

__version__ = "0.1.0"
