import pytest

from mcqforge import testkit


@pytest.fixture(scope="session")
def tok():
    return testkit.make_tokenizer()


@pytest.fixture()
def vocab_files(tmp_path):
    return testkit.write_tiny_vocab(tmp_path)


@pytest.fixture()
def mcq_items():
    return testkit.mcq_items(12)
