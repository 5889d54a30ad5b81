'''
Stage orchestration: ford -> aux -> branches -> verify -> zeta -> scan. Each stage adds a section
to the report and may write figures or CSV into the output directory.
'''

import io
import os
import csv

import numpy as np

import kizano
log = kizano.getLogger(__name__)

from zetabranch.settings import getSettings
from zetabranch.group import enumerateBall, primitiveHyperbolicClasses, fixedPairs, limitPoints, formatWord
from zetabranch.geometry.spheres import checkIsoIdentities
from zetabranch.geometry.ford import relevantSet, vertexCycles, checkConditionA, checkThirdSphere, spotcheckFundamental
from zetabranch.geometry.auxiliary import buildAuxiliary, verifyAuxiliary, cuspHeight
from zetabranch.branches.model import saveBranchSystem
from zetabranch.branches.construct import initialSystem, pruneToActive, computeTransitions
from zetabranch.branches.verify import verifyBranchProperties, checkGroupDescent
from zetabranch.spectral.transfer import chartIntervals, TransferOperator, fredholmDet, spectralRadius, resonanceScan
from zetabranch.spectral.zeta import compareDetVsZeta, csvRows
from zetabranch.cli.specfile import parseGroupSpec, groupFromSpec, heckeFreeSpec
from zetabranch.cli.render import renderDomain, renderBranches
from zetabranch.report import check, dumps, failures, writeAtomic
from zetabranch.errors import ZetaBranchError, IoError

STAGES = ('ford', 'aux', 'branches', 'verify', 'zeta', 'scan')
CSV_COLUMNS = ['re_s', 'im_s', 'det_re', 'det_im', 'zeta_re', 'zeta_im', 'rel_err', 'tail_bound']

class Pipeline(object):
    '''
    Lazily computed artifacts of one group spec; asking for a later stage runs its prerequisites.
    '''
    def __init__(self, group, settings: dict, out: str = None, branch_system=None):
        self.group = group
        self.settings = settings
        self.out = out
        self.user_system = branch_system
        self.report = { 'group': group.name, 'generators': group.labels(), 'seed': settings['seed'] }
        self.done = []
        self._ball = None
        self._classes = None
        self.relevant = None
        self.aux = None
        self.system = None
        self.candidates = None
        self.operator = None

    def _path(self, name: str) -> str:
        return os.path.join(self.out, name) if self.out else None

    @property
    def ball(self):
        if self._ball is None:
            self._ball = enumerateBall(self.group, self.settings['word_cutoff'], self.settings['max_ball'])
        return self._ball

    @property
    def classes(self):
        if self._classes is None:
            self._classes = primitiveHyperbolicClasses(self.group, self.settings['l_max'], ball=self.ball,
                                                       conjugator_cutoff=self.settings['conjugator_cutoff'])
        return self._classes

    def run(self, stage: str) -> dict:
        if stage not in STAGES:
            raise ValueError(f'Unknown stage: {stage}')
        for name in STAGES[:STAGES.index(stage) + 1]:
            if name in self.done:
                continue
            log.info(f'Stage {name}')
            try:
                getattr(self, f'stage_{name}')()
            except ZetaBranchError as e:
                e.args = (f'[{name}] {e.args[0] if e.args else e}',) + tuple(e.args[1:])
                raise
            self.done.append(name)
        return self.report

    def stage_ford(self):
        cfg = self.settings
        ball = self.ball
        self.relevant = relevantSet(ball)
        domain = self.relevant.domain
        cycles = vertexCycles(domain, ball)
        self.report['ford'] = {
            'cutoff': ball.cutoff,
            'elements': len(ball),
            'iso_identities': checkIsoIdentities(ball, cfg['samples'], cfg['seed']),
            'relevant_spheres': [
                { 'word': formatWord(s.word), 'center': s.center, 'radius': s.radius } for s in self.relevant.spheres
            ],
            'stable': self.relevant.stable,
            'real_endpoints': domain.realEndpoints(),
            'vertex_cycles': [
                check(c.omega is not None and c.height_discrepancy < 1e-9, angle_sum=c.angleSum, omega=c.omega,
                      height_discrepancy=c.height_discrepancy, transformation=formatWord(c.transformation))
                for c in cycles
            ],
            'condition_A': checkConditionA(domain),
            'third_sphere': checkThirdSphere(domain, len(self.group.generators) == 1),
            'fundamental': spotcheckFundamental(domain, ball, cfg['aux_samples'], cfg['seed']),
        }
        if self.out:
            renderDomain(domain, self._path('domain.svg'), cfg['svg']['width'], cfg['svg']['height'])

    def stage_aux(self):
        cfg = self.settings
        strip = cfg.get('auxiliary') or {}
        self.aux = buildAuxiliary(self.group, self.ball, strip.get('alpha_prime'), strip.get('beta_prime'))
        aux = self.aux
        self.report['aux'] = {
            'alpha': aux.alpha,
            'beta': aux.beta,
            'alpha_prime': aux.alpha_prime,
            'beta_prime': aux.beta_prime,
            'lambda': aux.lam,
            'cusp_height': cuspHeight(aux),
            'generators': aux.presentation_W.labels(),
            'checks': verifyAuxiliary(aux, cfg['aux_cutoff'], cfg['aux_samples'], cfg['seed'], self.ball),
        }

    def stage_branches(self):
        cfg = self.settings
        ball = self.ball
        self.candidates = self.user_system if self.user_system is not None else initialSystem(self.aux)
        pruned = pruneToActive(self.candidates, self.classes, fixedPairs(ball))
        if not pruned.transitions:
            shoot = ball.restrict(min(cfg['shoot_cutoff'], ball.cutoff))
            pruned = computeTransitions(pruned, shoot, cfg['grid'], limitPoints(ball), cfg['seed'], cfg['workers'])
        self.system = pruned
        self.report['branches'] = {
            'provenance': self.candidates.provenance,
            'candidates': [{ 'index': b.index, 'x': b.x, 'facing': b.facing } for b in self.candidates.branches],
            'active': pruned.indices(),
            'cardinalities': pruned.cardinalities(),
            'transitions': {
                f'{j},{k}': [t.describe() for t in items] for (j, k), items in sorted(pruned.transitions.items())
            },
            'classes': [
                { 'word': formatWord(c.word), 'cyclic_word': formatWord(c.cyclic_word), 'length': c.length,
                  'trace': c.trace } for c in self.classes
            ],
            'stats': pruned.stats,
        }
        if self.out:
            saveBranchSystem(pruned, self._path('branches.json'), self.group.name)
            window = (self.aux.alpha_prime - 0.05 * self.aux.lam, self.aux.beta_prime + 0.05 * self.aux.lam) if self.aux else None
            renderBranches(self.candidates, self._path('branches.svg'), cfg['svg']['width'], cfg['svg']['height'],
                           pruned.indices(), window)

    def stage_verify(self):
        cfg = self.settings
        self.report['verify'] = {
            'properties': verifyBranchProperties(self.system, self.ball, self.classes, cfg['samples'], cfg['seed']),
            'descent': checkGroupDescent(self.system, self.group, self.ball.cutoff, cfg['descent_cutoff'], self.ball),
        }

    def _operator(self) -> TransferOperator:
        if self.operator is None:
            cfg = self.settings
            points = list(limitPoints(self.ball))
            for cls in self.classes:
                points.extend(cls.representative.fixedPoints()[:2])
            charts = chartIntervals(self.system, np.array(points, dtype=float), cfg['chart_padding'],
                                    cfg['chart_min_halfwidth'])
            self.operator = TransferOperator(self.system, charts, cfg['order'], cfg['discretization'])
        return self.operator

    def stage_zeta(self):
        cfg = self.settings
        operator = self._operator()
        s_values = [complex(s) for s in cfg['s_values']]
        comparison = compareDetVsZeta(operator, self.classes, s_values, cfg['zeta_depth'], cfg['l_max'], self.ball.cutoff)
        diagnostics = []
        for s in s_values:
            result = fredholmDet(operator.matrix(s))
            diagnostics.append({ 's': s, 'log_abs_det': result.log_abs, 'eigenvalues': list(result.eigenvalues),
                                 'spectral_radius': spectralRadius(operator, s) })
        self.report['zeta'] = {
            'order': operator.order,
            'discretization': cfg['discretization'],
            'charts': { str(j): [c.u, c.v] for j, c in sorted(operator.charts.items()) },
            'contraction': operator.contraction(),
            'comparison': comparison,
            'diagnostics': diagnostics,
        }
        if self.out:
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator='\n')
            writer.writerow(CSV_COLUMNS)
            for row in csvRows(comparison):
                writer.writerow([repr(float(v)) for v in row])
            writeAtomic(self._path('zeta.csv'), buffer.getvalue())

    def stage_scan(self):
        cfg = self.settings
        scan = resonanceScan(self._operator(), tuple(cfg['scan']['rectangle']), cfg['scan']['grid'],
                             cfg['re_s_floor'], workers=cfg['workers'])
        self.report['scan'] = {
            'rectangle': list(scan.rectangle),
            'grid': scan.grid,
            'roots': [{ 's': r.s, 'residual': r.residual, 'iterations': r.iterations } for r in scan.roots],
            'discarded': scan.failures,
        }

def _parseS(text: str) -> complex:
    parts = [p.strip() for p in str(text).split(',')]
    if len(parts) > 2:
        raise ValueError(f'--s expects RE[,IM], got {text}')
    return complex(float(parts[0]), float(parts[1]) if len(parts) == 2 else 0.0)

def cliOverrides(config: dict) -> dict:
    '''
    Settings from the parsed command line; None values are left to the lower layers.
    '''
    overrides = {
        'word_cutoff': config.get('cutoff'),
        'grid': config.get('grid'),
        'order': config.get('order'),
        'seed': config.get('seed'),
        'samples': config.get('samples'),
        'workers': config.get('workers'),
        'discretization': config.get('discretization'),
    }
    if config.get('s'):
        overrides['s_values'] = [_parseS(s) for s in config['s']]
    if config.get('waive'):
        overrides['waive'] = [w.strip() for item in config['waive'] for w in item.split(',') if w.strip()]
    return overrides

def _finish(pipeline: Pipeline, waive: list) -> int:
    failed = failures(pipeline.report, waive)
    pipeline.report['failures'] = failed
    pipeline.report['waived'] = sorted(waive)
    if pipeline.out:
        writeAtomic(pipeline._path('report.json'), dumps(pipeline.report))
    if failed:
        for name in failed:
            log.error(f'Check failed: {name}')
        return 2
    log.info('All checks passed.')
    return 0

def _prepare(config: dict) -> tuple:
    resources = config.get('resources') or []
    if not resources:
        raise IoError('No group spec given.')
    group, options = parseGroupSpec(resources[0])
    system = options.pop('branch_system', None)
    app = config.get('zetabranch') if isinstance(config.get('zetabranch'), dict) else {}
    settings = getSettings(app, options, cliOverrides(config))
    if 'word_cutoff' in settings and settings['word_cutoff'] != group.word_cutoff:
        group = group._replace(word_cutoff=settings['word_cutoff'])
    out = config.get('out') or '.'
    os.makedirs(out, exist_ok=True)
    return group, settings, out, system

def run(config: dict) -> int:
    '''
    `zb run SPEC [--stage S]`: run the pipeline up to the stage and write report.json.
    '''
    group, settings, out, system = _prepare(config)
    pipeline = Pipeline(group, settings, out, system)
    pipeline.run(config.get('stage') or 'zeta')
    return _finish(pipeline, settings['waive'])

def render(config: dict) -> int:
    '''
    `zb render SPEC`: domain.svg and branches.svg only.
    '''
    group, settings, out, system = _prepare(config)
    pipeline = Pipeline(group, settings, out, system)
    pipeline.run('branches')
    return 0

def figure(config: dict) -> int:
    '''
    `zb figure --lambda L`: both figures of the example family at parameter L.
    '''
    spec = heckeFreeSpec(float(config.get('lambda') or 2.0))
    group = groupFromSpec(spec)
    overrides = cliOverrides(config)
    settings = getSettings({ 'auxiliary': spec['auxiliary'] }, overrides)
    out = config.get('out') or '.'
    os.makedirs(out, exist_ok=True)
    pipeline = Pipeline(group._replace(word_cutoff=settings['word_cutoff']), settings, out)
    pipeline.run('aux')
    candidates = initialSystem(pipeline.aux)
    active = pruneToActive(candidates, pipeline.classes, fixedPairs(pipeline.ball)).indices()
    aux = pipeline.aux
    window = (aux.alpha_prime - 0.05 * aux.lam, aux.beta_prime + 0.05 * aux.lam)
    renderBranches(candidates, pipeline._path('branches.svg'), settings['svg']['width'], settings['svg']['height'],
                   active, window)
    log.info(f'Active branches of {spec["name"]}: {active}')
    return 0
