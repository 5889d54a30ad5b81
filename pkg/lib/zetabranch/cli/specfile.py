'''
Group-spec files: a JSON (or YAML) document naming the generators of the group plus optional
tolerances, strip override, seed and branch system.
'''

import os
import json
import math

import yaml

import kizano
log = kizano.getLogger(__name__)

from zetabranch.moebius import EPSILON
from zetabranch.group import GroupPresentation
from zetabranch.branches.model import matrixFromEntries, systemFromDict, loadBranchSystem
from zetabranch.errors import ParseError, IoError

# Keys of a spec file that feed the configuration.
SPEC_OPTIONS = ('word_cutoff', 'seed', 'l_max', 'grid', 'order', 'samples')

def readDocument(path: str) -> dict:
    try:
        with open(path, 'r') as handle:
            if path.endswith(('.yml', '.yaml')):
                data = yaml.safe_load(handle)
            else:
                data = json.load(handle)
    except OSError as e:
        raise IoError(f'Cannot read {path}: {e}') from e
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ParseError(f'{path}: {e}') from e
    if not isinstance(data, dict):
        raise ParseError(f'{path}: expected an object at the top level')
    return data

def groupFromSpec(data: dict) -> GroupPresentation:
    '''
    Validate and normalise the generators: each matrix is divided by sqrt(det) and rejected when
    det <= 0 or when it normalises to the identity.
    '''
    eps = float(data.get('epsilon', EPSILON))
    cutoff = int(data.get('word_cutoff', 6))
    if not math.isfinite(eps) or eps <= 0:
        raise ParseError(f'epsilon must be a positive number, got {eps}')
    if cutoff < 0:
        raise ParseError(f'word_cutoff must be non-negative, got {cutoff}')
    items = data.get('generators')
    if not isinstance(items, list) or not items:
        raise ParseError('"generators" must be a non-empty list')
    generators = []
    for i, item in enumerate(items):
        if not isinstance(item, dict) or 'label' not in item or 'matrix' not in item:
            raise ParseError(f'Generator {i + 1} needs "label" and "matrix"')
        label = str(item['label'])
        generators.append((label, matrixFromEntries(item['matrix'], f'generator "{label}"', eps)))
    group = GroupPresentation.of(generators, eps, cutoff, str(data.get('name', '')))
    log.info(f'Loaded group "{group.name}" with generators {", ".join(group.labels())}.')
    return group

def parseGroupSpec(path: str) -> tuple:
    '''
    (GroupPresentation, options) from a spec file. The options carry the configuration overrides,
    the strip override under `auxiliary` and an already-loaded `branch_system` when one is given
    inline or as a path relative to the spec.
    '''
    data = readDocument(path)
    group = groupFromSpec(data)
    options = { key: data[key] for key in SPEC_OPTIONS if key in data }
    auxiliary = data.get('auxiliary')
    if auxiliary is not None:
        if not isinstance(auxiliary, dict):
            raise ParseError('"auxiliary" must be an object with alpha_prime and beta_prime')
        try:
            options['auxiliary'] = { k: float(auxiliary[k]) for k in ('alpha_prime', 'beta_prime') if k in auxiliary }
        except (TypeError, ValueError) as e:
            raise ParseError(f'auxiliary: {e}')
    system = data.get('branch_system')
    if isinstance(system, str):
        options['branch_system'] = loadBranchSystem(os.path.join(os.path.dirname(path), system), group)
    elif isinstance(system, dict):
        options['branch_system'] = systemFromDict(system, group)
    elif system is not None:
        raise ParseError('"branch_system" must be an object or a path')
    return group, options

def heckeFreeSpec(L: float) -> dict:
    '''
    Spec of the group <h_L, s> with h_L = [[L+1, L-1], [L-1, L+1]] / (2 sqrt L) and s = [[0, -1], [1, 0]],
    with the strip (alpha', beta') = +-(L + 1 + 3 sqrt L) / (L - 1).
    '''
    if not L > 1:
        raise ParseError(f'The family needs a parameter above 1, got {L}')
    root = math.sqrt(L)
    norm = 2.0 * root
    beta_prime = (L + 1 + 3 * root) / (L - 1)
    return {
        'name': f'hecke-free-{L:g}',
        'generators': [
            { 'label': 'h', 'matrix': [(L + 1) / norm, (L - 1) / norm, (L - 1) / norm, (L + 1) / norm] },
            { 'label': 's', 'matrix': [0.0, -1.0, 1.0, 0.0] },
        ],
        'epsilon': EPSILON,
        'word_cutoff': 6,
        'auxiliary': { 'alpha_prime': -beta_prime, 'beta_prime': beta_prime },
    }
