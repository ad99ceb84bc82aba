"""Figure rendering: every path must leave a readable PNG behind."""

from parseid.evaluation import QueryRow
from parseid.report import save_ap_histogram, save_cmc_figure, save_feature_figure

ROWS = [
    QueryRow("q1", 1, 1.0),
    QueryRow("q2", 3, 0.5),
    QueryRow("q3", None, None),
    QueryRow("q4", 1, 0.9),
]

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def assert_png(path):
    data = path.read_bytes()
    assert data[:8] == PNG_MAGIC
    assert len(data) > 1000  # an actual plot, not a blank stub


def test_cmc_figure(tmp_path):
    out = tmp_path / "cmc.png"
    save_cmc_figure(ROWS, out)
    assert_png(out)


def test_ap_histogram(tmp_path):
    out = tmp_path / "ap.png"
    save_ap_histogram(ROWS, out)
    assert_png(out)


def test_empty_rows_still_write_a_figure(tmp_path):
    cmc = tmp_path / "cmc.png"
    ap = tmp_path / "ap.png"
    save_cmc_figure([], cmc)
    save_ap_histogram([QueryRow("q", None, None)], ap)
    assert_png(cmc)
    assert_png(ap)


def test_feature_figure(tmp_path, gallery_records):
    out = tmp_path / "features.png"
    save_feature_figure(gallery_records[0], out)
    assert_png(out)
