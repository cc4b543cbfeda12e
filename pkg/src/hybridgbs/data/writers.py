import csv
import json
import math
import sys
from contextlib import contextmanager
from typing import Iterator, Optional, TextIO

from hybridgbs.api.v1.common import complex_entries
from hybridgbs.api.v1.gbs_req_resp import ProbabilitiesResponse, SamplesResponse, ToySweepResponse, ValidationReport
from hybridgbs.kernel.gaussian import CovarianceMatrix

SWEEP_COLUMNS = ["sweep_value", "eta", "alpha_abs", "alpha_c", "alpha_max", "r_eff", "q_eff"]


@contextmanager
def output_stream(path: Optional[str]) -> Iterator[TextIO]:
    """Open path for writing, or pass standard output through when no path is given."""
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="") as f:
        yield f


def write_sweep_csv(out: TextIO, response: ToySweepResponse):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in response.rows:
        values = [getattr(row, c) for c in SWEEP_COLUMNS]
        writer.writerow([_number(v) for v in values])


def write_probability_csv(out: TextIO, response: ProbabilitiesResponse):
    """Columns n_1..n_m, probability; 17 significant digits reproduce every float exactly."""
    m = len(response.patterns[0]) if response.patterns else 0
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([f"n_{k + 1}" for k in range(m)] + ["probability"])
    for pattern, p in zip(response.patterns, response.probabilities):
        writer.writerow(list(pattern) + ["%.17g" % p])


def write_samples_csv(out: TextIO, response: SamplesResponse):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(response.samples)


def write_report_json(out: TextIO, report: ValidationReport):
    json.dump(report.dict(), out, indent=2)
    out.write("\n")


def write_covariance_json(out: TextIO, G: CovarianceMatrix):
    data = {"m_ph": G.layout.m_ph, "m_at": G.layout.m_at, "N": complex_entries(G.N), "A": complex_entries(G.A)}
    json.dump(data, out)
    out.write("\n")


def format_hafnian(value: complex) -> str:
    """'re im' with 12 significant digits; parts below 1e-12 of the modulus print as 0."""
    scale = abs(value)
    parts = []
    for part in (value.real, value.imag):
        if part == 0 or abs(part) <= 1e-12 * scale:
            part = 0.0
        parts.append("%.12g" % part)
    return " ".join(parts)


def _number(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "nan"
    return repr(float(value))
