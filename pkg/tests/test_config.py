import argparse
from dataclasses import fields
from unittest.mock import patch

import pytest

from app.config import Config, RunConfig, get_config


def args(**kwargs):
    defaults = {'command': 'solve', 'input': None, 'mode': None, 'graph_format': None, 'fixed': None,
                'all_solutions': False, 'prune': None, 'no_antipodal_restriction': False,
                'jobs': None, 'output': None, 'format': None}
    defaults.update(kwargs)
    return argparse.Namespace(**defaults)


def test_config_load_from_env_vars():
    with patch.dict('os.environ', {'SOLVER_JOBS': '4', 'ORACLE_DENOMINATOR': '120'}):
        config = Config()

    assert config.get_int('SOLVER_JOBS') == 4
    assert config.get('ORACLE_DENOMINATOR') == '120'


def test_config_default_values():
    with patch.dict('os.environ', {}, clear=True):
        config = Config()

    assert config.get('LOG_LEVEL') == 'INFO'
    assert config.get_int('ORACLE_DENOMINATOR') == 840
    assert config.get_int('ORACLE_BUDGET') == 100_000_000
    assert config.get_bool('RESTRICT_ANTIPODAL')
    assert not config.get_bool('PRUNE')


def test_config_empty_value_falls_back_to_default():
    with patch.dict('os.environ', {'LEMMA_TRIALS': ''}):
        config = Config()

    assert config.get_int('LEMMA_TRIALS') == 100


def test_config_set_and_attribute_access():
    config = Config()
    config.set('max_batch_size', '16')
    assert config.MAX_BATCH_SIZE == '16'
    assert config.to_dict()['MAX_BATCH_SIZE'] == '16'


def test_get_config():
    config = get_config()
    assert isinstance(config, Config)


def test_run_config_uses_config_defaults():
    with patch.dict('os.environ', {'SOLVER_JOBS': '3', 'PRUNE': 'true', 'RANDOM_SEED': '7'}):
        cfg = RunConfig.from_args(args(), Config())

    assert cfg.jobs == 3
    assert cfg.prune
    assert cfg.seed == 7
    assert cfg.output_format == 'json'
    assert cfg.restrict_antipodal


def test_run_config_flags_override_config():
    with patch.dict('os.environ', {'SOLVER_JOBS': '3'}):
        cfg = RunConfig.from_args(args(jobs=1, no_antipodal_restriction=True, format='text'), Config())

    assert cfg.jobs == 1
    assert not cfg.restrict_antipodal
    assert cfg.output_format == 'text'


def test_run_config_fields_are_the_cli_options():
    assert {f.name for f in fields(RunConfig)} == {
        'command', 'input_path', 'mode', 'graph_format', 'fixed_spec', 'all_solutions', 'prune',
        'restrict_antipodal', 'oracle_denominator', 'oracle_budget', 'oracle_max_free',
        'output_format', 'output_path', 'jobs', 'seed', 'trials',
    }


def test_run_config_bench_defaults_to_text():
    assert RunConfig.from_args(args(command='bench'), Config()).output_format == 'text'


@pytest.mark.parametrize("mode, has_zero, has_one, has_fixed, expected", [
    ('auto', False, False, False, 'migg'),
    ('migg', False, False, False, 'migg'),
    ('auto', True, True, True, 'rmigg-both'),
    ('rmigg', True, False, True, 'rmigg-one'),
    ('auto', False, True, True, 'rmigg-one'),
    ('rmigg', False, False, True, 'rmigg-none'),
])
def test_resolve_mode(mode, has_zero, has_one, has_fixed, expected):
    assert RunConfig(command='solve', mode=mode).resolve_mode(has_zero, has_one, has_fixed) == expected


@pytest.mark.parametrize("mode, has_fixed", [('migg', True), ('rmigg', False), ('greedy', False)])
def test_resolve_mode_rejects(mode, has_fixed):
    with pytest.raises(ValueError):
        RunConfig(command='solve', mode=mode).resolve_mode(False, False, has_fixed)


if __name__ == '__main__':
    pytest.main()
