'''
Default tunables and the merge of configuration sources.
The CLI layers kizano's application config, the group-spec file and the command line on top of these.
'''

import copy

import kizano
log = kizano.getLogger(__name__)

DEFAULTS = {
    'word_cutoff': 6,
    'max_ball': 250000,
    'conjugator_cutoff': 3,
    'l_max': 6.0,
    'shoot_cutoff': 4,
    'descent_cutoff': 2,
    'aux_cutoff': 4,
    'aux_samples': 200,
    'grid': 32,
    'samples': 50,
    'seed': 20240101,
    'order': 16,
    'discretization': 'chebyshev',
    'chart_padding': 1.2,
    'chart_min_halfwidth': 0.5,
    'zeta_depth': 40,
    're_s_floor': 0.25,
    's_values': [1.0, 1.5, 2.0],
    'scan': {
        'rectangle': [0.5, 2.5, -1.0, 1.0],
        'grid': 16,
    },
    'workers': 1,
    'waive': [],
    'svg': {
        'width': 900,
        'height': 420,
    },
}

def getSettings(*overrides: dict) -> dict:
    '''
    Merge the defaults with each override in turn, later ones winning.
    None entries are skipped so optional CLI values do not clobber the spec file.
    '''
    result = copy.deepcopy(DEFAULTS)
    for override in overrides:
        if not override:
            continue
        cleaned = { k: v for k, v in override.items() if v is not None }
        result = kizano.utils.dictmerge(result, cleaned)
    return result
