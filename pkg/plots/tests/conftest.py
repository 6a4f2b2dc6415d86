import pytest

HEADER = "mu,zeta,p_good,p_sift_err,av_ent,fig_merit"


def make_csv(path, rows):
    lines = [HEADER] + [",".join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def six_curve_csv(tmp_path):
    rows = []
    for label in ("0", "1", "10", "100", "1000", "inf"):
        scale = 1.0 if label == "0" else 1.1
        for i, mu in enumerate((0.0, 0.004, 0.01, 0.04)):
            err = 0.5 / (1 + i) * scale / 1.1
            rows.append((mu, label, 1e-6 * (i + 1), err, 0.99, 0.99e-6 * (i + 1)))
    return make_csv(tmp_path / "sweep.csv", rows)
