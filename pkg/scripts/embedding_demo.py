"""Embed the plane curve x2^2 + x1*x2 = 1 away from the last hyperplane and check it on sampled points."""

from __future__ import annotations

from sprayforge.polycore import parse_poly
from sprayforge.spray2 import jelonek_embed, sample_hypersurface_points


def main() -> None:
    T = parse_poly("x2^2 + x1*x2 - 1", 2)
    emb = jelonek_embed(T, (0, 1), None, seed=0)
    nums, G = emb.gamma_rational()
    print("gamma        :", [p.to_str() for p in nums], "/", G.to_str())
    print("image ideal  :", [g.to_str() for g in emb.image_ideal.generators])
    pts = sample_hypersurface_points(T, seed=0, count=25)
    print("gamma(0, 1)  :", [str(c) for c in emb.gamma((0, 1))])
    print("round trip   :", sum(emb.roundtrip(pts)), "of", len(pts))
    print("on the image :", sum(emb.image_ideal.vanishes_at(emb.gamma(p)) for p in pts), "of", len(pts))
    for c in emb.checks:
        print(f"  [{c.status}] {c.name}")


if __name__ == "__main__":
    main()
