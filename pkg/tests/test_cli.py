"""
Command Line Tests
==================

Run with: pytest tests/test_cli.py -v
"""

import json

import pandas as pd
import pytest

from prakriti.cli import EXIT_ERROR, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main, parse_args


@pytest.fixture
def data_csv(tmp_path):
    """Synthetic 300 x 40 labelled CSV written through the CLI."""
    code = main([
        'synth', '--rows', '300', '--features', '40', '--informative', '10',
        '--signal', '0.9', '--missing-rate', '0.01', '--seed', '3',
        '--output-dir', str(tmp_path), '--out', 'data.csv', '-q',
    ])
    assert code == EXIT_OK
    return tmp_path / 'data.csv'


class TestParser:
    """Test argument parsing"""

    def test_defaults(self):
        """Common options have their documented defaults"""
        args = parse_args(['select', '--in', 'x.csv'])
        assert args.k == 20
        assert args.seed is None
        assert args.format == 'csv'
        assert args.output_dir == '.'

    def test_unknown_flag_exits_64(self):
        """Usage errors exit with status 64"""
        with pytest.raises(SystemExit) as info:
            main(['select', '--in', 'x.csv', '--bogus'])
        assert info.value.code == EXIT_USAGE

    def test_missing_command_exits_64(self):
        """A missing subcommand is a usage error"""
        with pytest.raises(SystemExit) as info:
            main([])
        assert info.value.code == EXIT_USAGE

    def test_verbose_and_quiet_exclusive(self):
        """-v and -q cannot be combined"""
        with pytest.raises(SystemExit) as info:
            main(['sweep', '-v', '-q'])
        assert info.value.code == EXIT_USAGE


class TestCommands:
    """Test the subcommands end to end"""

    def test_synth(self, data_csv):
        """synth writes a labelled CSV with the requested shape"""
        frame = pd.read_csv(data_csv, keep_default_na=False)
        assert frame.shape == (300, 41)
        assert frame.columns[-1] == 'dosha'

    def test_select_writes_k_rows(self, data_csv, tmp_path, capsys):
        """select --k 20 writes a 20-row ranking plus header"""
        out = tmp_path / 'sel'
        code = main(['select', '--in', str(data_csv), '--k', '20', '--output-dir', str(out),
                     '--reduced-out', 'reduced.csv', '-q'])
        assert code == EXIT_OK
        lines = (out / 'ranking.csv').read_text().splitlines()
        assert lines[0] == 'feature,statistic,dof,p_value'
        assert len(lines) == 21
        reduced = pd.read_csv(out / 'reduced.csv', keep_default_na=False)
        assert reduced.shape[1] == 21
        assert capsys.readouterr().out.startswith('select: kept 20 of 40 features')

    def test_train_predict_evaluate(self, data_csv, tmp_path, capsys):
        """A trained model predicts every row and evaluates on labelled data"""
        out = str(tmp_path / 'run')
        assert main(['train', '--model', 'mnb', '--in', str(data_csv), '--output-dir', out, '-q']) == EXIT_OK
        model = f"{out}/model.json"
        assert json.loads(open(model).read())['model'] == 'mnb'

        assert main(['predict', '--model', model, '--in', str(data_csv), '--output-dir', out, '-q']) == EXIT_OK
        predictions = pd.read_csv(f"{out}/predictions.csv")
        assert list(predictions.columns) == ['row', 'dosha']
        assert len(predictions) == 300

        assert main(['evaluate', '--model', model, '--in', str(data_csv), '--output-dir', out,
                     '--format', 'json', '-q']) == EXIT_OK
        report = json.loads(open(f"{out}/report.json").read())
        assert 0.0 <= report['accuracy'] <= 1.0
        assert report['recall'] == report['accuracy']
        assert 'evaluate: accuracy' in capsys.readouterr().out

    def test_evaluate_csv_has_no_test_size(self, data_csv, tmp_path):
        """A CSV report of a whole file omits the held-out fraction"""
        out = str(tmp_path / 'csv')
        assert main(['train', '--model', 'mnb', '--in', str(data_csv), '--output-dir', out, '-q']) == EXIT_OK
        code = main(['evaluate', '--model', f"{out}/model.json", '--in', str(data_csv),
                     '--output-dir', out, '-q'])
        assert code == EXIT_OK
        report = pd.read_csv(f"{out}/report.csv")
        assert list(report.columns) == ['n_features', 'accuracy', 'precision', 'f_score', 'recall']
        assert report['n_features'].iloc[0] == 40
        assert report['recall'].iloc[0] == pytest.approx(report['accuracy'].iloc[0])

    def test_train_tree_with_pruning(self, data_csv, tmp_path):
        """dtree options reach the saved model"""
        out = str(tmp_path / 'tree')
        code = main(['train', '--model', 'dtree', '--prune', '--max-depth', '4',
                     '--in', str(data_csv), '--output-dir', out, '-q'])
        assert code == EXIT_OK
        params = json.loads(open(f"{out}/model.json").read())['params']
        assert params['prune'] is True
        assert params['max_depth'] == 4

    def test_cluster(self, data_csv, tmp_path):
        """cluster writes assignments and a model file"""
        out = tmp_path / 'clu'
        code = main(['cluster', '--in', str(data_csv), '--k', '7', '--output-dir', str(out), '-q'])
        assert code == EXIT_OK
        assignments = pd.read_csv(out / 'assignments.csv', keep_default_na=False)
        assert len(assignments) == 300
        assert assignments['cluster'].between(0, 6).all()
        assert (out / 'kmodes.json').exists()

    def test_sweep(self, tmp_path):
        """sweep writes the 20-row table from a config file"""
        config = tmp_path / 'small.toml'
        config.write_text(
            "schema_version = 1\n"
            "[generator]\nrows = 200\nfeatures = 105\nmissing_rate = 0.0\n"
        )
        out = tmp_path / 'sweep'
        code = main(['sweep', '--config', str(config), '--seed', '1', '--output-dir', str(out), '-q'])
        assert code == EXIT_OK
        frame = pd.read_csv(out / 'sweep.csv')
        assert len(frame) == 20
        assert list(frame.columns) == ['model', 'test_size', 'n_features',
                                       'accuracy', 'precision', 'f_score', 'recall']

    def test_sweep_partial_exit(self, tmp_path, monkeypatch):
        """Failed cells make sweep exit with status 2"""
        from prakriti import experiment
        from prakriti.errors import FitError

        def broken(*args, **kwargs):
            raise FitError("no fit")

        monkeypatch.setattr(experiment, 'fit_model', broken)
        config = tmp_path / 'tiny.toml'
        config.write_text(
            "schema_version = 1\n"
            "[generator]\nrows = 100\nfeatures = 30\n"
            "[sweep]\nfeature_counts = [10]\nmodels = ['mnb']\n"
        )
        code = main(['sweep', '--config', str(config), '--output-dir', str(tmp_path / 'o'), '-q'])
        assert code == EXIT_PARTIAL

    def test_missing_input_is_error(self, tmp_path, capsys):
        """Unreadable inputs exit with status 1 and a staged message"""
        code = main(['select', '--in', str(tmp_path / 'absent.csv'), '-q'])
        assert code == EXIT_ERROR
        assert capsys.readouterr().err.startswith('error [')

    def test_bad_k_is_error(self, data_csv, tmp_path, capsys):
        """K above the feature count reports the select stage"""
        code = main(['select', '--in', str(data_csv), '--k', '99', '--output-dir', str(tmp_path), '-q'])
        assert code == EXIT_ERROR
        assert 'error [select]' in capsys.readouterr().err


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
