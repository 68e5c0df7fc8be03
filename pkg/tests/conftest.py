"""
Shared fixtures
===============
"""

import pytest

from prakriti.synth import GeneratorSpec, generate


@pytest.fixture
def strong_table():
    """700 x 30 synthetic table, 20 informative features, signal 0.95."""
    spec = GeneratorSpec(rows=700, features=30, informative_features=20, signal=0.95)
    return generate(spec, seed=7)


@pytest.fixture
def csv_file(tmp_path):
    """Write CSV text to a temporary file and return its path."""
    def _write(text, name='data.csv'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return _write
