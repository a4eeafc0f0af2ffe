"""Build the type-1 flow spray for the line in C^3 and print its derivative at b."""

from __future__ import annotations

from sprayforge.blowup import Center, build_chart, epoint_to_chart
from sprayforge.polycore import parse_poly, parse_polys, spray_names
from sprayforge.spray1 import FlowData, lift_flow_spray, spray_derivative


def main() -> None:
    line = Center(3, tuple(parse_polys(["x1", "x2"], 3)))
    chart = build_chart(line, 2)
    b = epoint_to_chart(chart, (0, 0, 0), (1, 1, 0))
    flow = FlowData.build([[1, 0, 0], [0, 0, 1]], (0, 1, 0), parse_poly("y1", 2, ["y1", "y2"]), line)
    spray = lift_flow_spray(flow, chart, b, xi=(1, 1, 0, 0))
    names = spray_names(3, 2)
    d = spray_derivative(spray)
    print("chart relations:", chart.relation_strings())
    print("f(t, x)       :", [p.to_str(names) for p in spray.flow.phi])
    print("lambda(t, y)  :", [p.to_str(names) for p in spray.lambda_fns])
    print("d lambda / dt :", [str(c) for c in d.closed_form], "(closed form)")
    print("               ", [str(c) for c in d.symbolic], "(symbolic)")
    print("affine chart  :", [str(c) for c in d.affine])
    for c in spray.checks:
        print(f"  [{c.status}] {c.name}")


if __name__ == "__main__":
    main()
