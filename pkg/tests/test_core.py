#!/usr/bin/env python
# -*- coding: utf-8 -*-

# 3rd party
import pytest
# Own
from conftest import datapath
from radmab import ExperimentReport, run_experiment, run_sweep
from radmab.core import BUILTIN_TEMPLATES
from radmab.io import load_config


@pytest.fixture(scope='module')
def experiment():
    return run_experiment(load_config(datapath('tiny.yaml')))


def test_builtin_templates():
    assert BUILTIN_TEMPLATES == ['default.md', 'sweep.md']


def test_default_report(experiment):
    report = ExperimentReport(experiment, name='Tiny').report()
    assert report.startswith('# Tiny')
    for name in experiment.config.algorithms:
        assert name in report
    assert 'Throughput over time' in report


def test_data_as_dict(experiment):
    data = ExperimentReport(experiment).data_as_dict()
    assert data['num_beams'] == 21
    assert data['rows'] == experiment.rows
    assert data['parameter'] is None
    assert set(data['gate_sizes']) == {('', 'ucb-ag'), ('', 'ucb-dg')}
    assert all(1 <= v <= 21 for v in data['gate_sizes'].values())


def test_string_template(experiment):
    report = ExperimentReport(experiment).report(
        template='{{ rows|length }} rows, {{ algorithms|join("/") }}')
    assert report == '4 rows, dbf/ucb/ucb-ag/ucb-dg'


def test_file_template(experiment, tmpdir):
    path = tmpdir.join('mine.md')
    path.write('horizon {{ config.horizon }}')
    assert ExperimentReport(experiment).report(template=str(path)) == 'horizon 120'


def test_sweep_report():
    result = run_sweep(load_config(datapath('sweep_tiny.yaml')))
    report = ExperimentReport(result, name='Sweep')
    assert report.default_template == 'sweep.md'
    rendered = report.report()
    assert 'num_scs' in rendered
    assert rendered.count('±') == 2 * 2 * 2
    html = report.report(process_markdown=True)
    assert '<table>' in html
