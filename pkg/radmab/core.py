#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Reports of finished experiments. `ExperimentReport` wraps an experiment or
sweep result and renders it through Jinja2 templates, optionally as HTML.
"""

# Stdlib
import builtins
import math
import os
# 3rd party
from markdown import markdown
from jinja2 import PackageLoader
from jinja2.sandbox import SandboxedEnvironment as Environment
import numpy as np
# Own
from .harness import SweepResult
from .utils import greeting

__here__ = os.path.abspath(os.path.dirname(__file__))
BUILTIN_TEMPLATES = sorted(os.listdir(os.path.join(__here__, 'templates')), key=str.lower)


class ExperimentReport(object):

    """
    Markdown report of an experiment or a sweep.

    Quick and easy usage: `ExperimentReport(run_experiment(config)).report()`

    Parameters
    ----------
    result : radmab.harness.ExperimentResult or radmab.harness.SweepResult
    name : str, optional
        Title of the report.
    missing : str, optional
        Shown instead of empty values.
    """

    def __init__(self, result, name='radmab experiment', missing='N/A'):
        self.result = result
        self.name = name
        self.is_sweep = isinstance(result, SweepResult)
        self.jinja_env = Environment(trim_blocks=True, lstrip_blocks=True,
                                     loader=PackageLoader('radmab', 'templates'))
        self.jinja_env.globals['missing'] = missing
        self.jinja_env.globals['np'] = np
        self.jinja_env.globals['degrees'] = math.degrees
        self.jinja_env.globals.update(builtins.__dict__)

    @property
    def default_template(self):
        return 'sweep.md' if self.is_sweep else 'default.md'

    def report(self, template=None, process_markdown=False):
        """
        Render the report.

        Parameters
        ----------
        template : str, optional
            One of the BUILTIN_TEMPLATES, a local file or a Jinja2 string.
            Take in mind that a non-existent file is interpreted as a string!
            Defaults to ``sweep.md`` for sweeps and ``default.md`` otherwise.
        process_markdown : bool, optional=False
            Whether to further render the Markdown as HTML.
        """
        template = template or self.default_template
        if template in BUILTIN_TEMPLATES:
            t = self.jinja_env.get_template(template)
        else:
            if os.path.isfile(template):
                with open(template) as f:
                    template = f.read()
            t = self.jinja_env.from_string(template)
        rendered = t.render(name=self.name, **self.data_as_dict())
        if process_markdown:
            return markdown(rendered, extensions=['markdown.extensions.tables',
                                                  'markdown.extensions.fenced_code',
                                                  'markdown.extensions.sane_lists'])
        return rendered

    def data_as_dict(self):
        """Fields available to templates."""
        if self.is_sweep:
            experiments = self.result.experiments
            config = experiments[0].config
            d = {'parameter': self.result.parameter, 'values': self.result.values}
        else:
            experiments = [self.result]
            config = self.result.config
            d = {'parameter': None, 'values': []}
        grid = config.beam_grid()
        d.update(
            greeting=greeting(),
            config=config,
            rows=self.result.rows,
            timeseries=self.result.timeseries,
            algorithms=config.algorithms,
            num_beams=grid.count,
            mu_beams=sorted(set(b for e in experiments for b in e.mu_beams)),
            gate_sizes=self.gate_sizes(experiments),
        )
        return d

    @staticmethod
    def gate_sizes(experiments):
        """Mean number of arms left to the UCB loop by each gated algorithm."""
        sizes = {}
        for e in experiments:
            for trace in e.traces:
                if not trace.algorithm.startswith('ucb-'):
                    continue
                arms = set(r.arm for r in trace.records if r.arm >= 0)
                sizes.setdefault((e.sweep_value, trace.algorithm), []).append(len(arms))
        return {key: float(np.mean(v)) for key, v in sizes.items()}
