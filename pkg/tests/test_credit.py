import pytest

from pclabels.credit import load_credit_card
from pclabels.dataset import BUCKETIZED, CATEGORICAL

HEADER = "ID,LIMIT_BAL,SEX,AGE,default payment next month"


def rows(n):
    return "".join(f"{i + 1},{10000 * (i + 1)},{1 + i % 2},{20 + i},{i % 2}\n" for i in range(n))


@pytest.mark.parametrize("prefix", ["", ",X1,X2,X5,Y\n"])
def test_loader_drops_id_and_bucketizes(tmp_path, prefix):
    path = tmp_path / "credit.csv"
    path.write_text(prefix + HEADER + "\n" + rows(20))
    d = load_credit_card(str(path))
    assert d.names == ("LIMIT_BAL", "SEX", "AGE", "default payment next month")
    kinds = [a.kind for a in d.schema]
    assert kinds == [BUCKETIZED, CATEGORICAL, BUCKETIZED, CATEGORICAL]
    assert len(d.schema[0].domain) == 5 and d.row_count == 20
