import os, sys
import argparse
from signal import signal, SIGINT

import kizano
kizano.Config.APP_NAME = 'zetabranch'
log = kizano.getLogger(__name__)

import zetabranch.cli.pipeline as pipeline
from zetabranch.errors import ZetaBranchError

ACTIONS = {
    'run': pipeline.run,
    'render': pipeline.render,
    'figure': pipeline.figure,
}

def getOptions() -> dict:
    '''
    Parse command line options. The action is the first bare word naming one of ACTIONS; any other
    bare word is a resource (the group spec).
    '''
    options = argparse.ArgumentParser(description="zetabranch - branches, transfer operators and zeta functions of Fuchsian groups")
    options.add_argument("--stage", type=str, default=None, choices=pipeline.STAGES, help="Last pipeline stage to run")
    options.add_argument("--s", type=str, action='append', default=None, metavar='RE[,IM]',
                        help="Point s for the zeta comparison; may be repeated")
    options.add_argument("--order", type=int, default=None, help="Collocation order per chart")
    options.add_argument("--cutoff", type=int, default=None, help="Word-length cutoff of the enumerated ball")
    options.add_argument("--grid", type=int, default=None, help="Shooting grid size per branch")
    options.add_argument("--samples", type=int, default=None, help="Samples per sampled check")
    options.add_argument("--seed", type=int, default=None, help="Seed of every sampling step")
    options.add_argument("--workers", type=int, default=None, help="Worker processes for shooting and scans")
    options.add_argument("--discretization", type=str, default=None, choices=['chebyshev', 'chebyshev-lobatto'],
                        help="Collocation scheme")
    options.add_argument("--out", type=str, default=None, help="Output directory")
    options.add_argument("--waive", type=str, action='append', default=None, metavar='CHECK,...',
                        help="Checks whose failure does not fail the run")
    options.add_argument("--lambda", dest='lambda', type=float, default=None, help="Parameter of the example family")
    options.add_argument("--log-level", metavar='log_level', type=str, default="INFO",
                        help="Verbosity of the logger", choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])

    opts, other = options.parse_known_args()
    if not 'LOG_LEVEL' in os.environ:
        os.environ['LOG_LEVEL'] = opts.log_level
        log.setLevel(opts.log_level)
    action = None
    opts.resources = []
    while other:
        arg = other.pop(0)
        if arg in list(ACTIONS.keys()) and action is None:
            action = arg
        else:
            opts.resources.append(arg)
    if action:
        opts.action = action
    else:
        log.error('No action specified!')
        options.print_help()
    return opts.__dict__

def interrupt(signal, frame):
    log.error('Caught ^C interrupt, exiting...')
    sys.exit(8)

def main():
    '''
    entrypoint.
    '''
    import kizano.logger
    kizano.log.setLevel(kizano.logger.logging.CRITICAL)
    config = kizano.getConfig()
    opts = getOptions()
    config = kizano.utils.dictmerge(config, opts)
    log.debug(config)
    signal(SIGINT, interrupt)
    action = config.get('action')
    if action not in ACTIONS:
        return 1
    try:
        return ACTIONS[action](config)
    except (ZetaBranchError, ValueError) as e:
        log.error(str(e))
        log.debug('Traceback:', exc_info=True)
        return 1

if __name__ == "__main__":
    sys.exit( main() )
