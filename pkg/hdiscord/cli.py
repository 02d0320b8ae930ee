"""
Command-line interface: D^H for state files, model scans and verification.

Usage:
    python3 dh.py discord STATE.json [--method auto]
    python3 dh.py discord --method werner --r 0.5
    python3 dh.py scan lmg-iso --start 0.05 --stop 2 --points 40 --output out.csv
    python3 dh.py verify conjecture1 --trials 50
"""

import argparse
import json
import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from hdiscord import __version__
from hdiscord.config import LOG_DIR, LOG_FORMAT, LOG_LEVEL, SIGNIFICANT_DIGITS, ResolvedConfig, resolve_config
from hdiscord.core import catalogue
from hdiscord.core.state_io import load_state
from hdiscord.core.states import ClassicalState, DensityMatrix, PureState
from hdiscord.errors import DiscordError, DomainError, StateFileError, UnsupportedError, UsageError
from hdiscord.processors import closed_forms
from hdiscord.processors.engine import DiscordResult, dh_bruteforce, dh_optimize
from hdiscord.processors.symmetric import dh_symmetric, symmetric_from_state
from hdiscord.utils.scan_runner import MODELS, ScanSpec, rows_to_csv, run_scan
from hdiscord.utils.verify_suite import SUITES, VerifySuite

logger = logging.getLogger(__name__)

METHODS = ("auto", "optimize", "bruteforce", "pure-bipartite", "werner",
           "bell-diagonal", "xstate", "symmetric")
CROSS_CHECK_MAX_QUBITS = 3
CROSS_CHECK_TOL = 1e-4
BELL_TOL = 1e-10


def setup_logging(level: str = LOG_LEVEL, log_dir: Path = LOG_DIR):
    """Log to a dated file and stderr; stdout stays reserved for results"""
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / f"hdiscord_{datetime.now().strftime('%Y%m%d')}.log"
    logging.basicConfig(
        level=getattr(logging, str(level).upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stderr),
        ],
    )


# ---------------------------------------------------------------------------
# JSON payload
# ---------------------------------------------------------------------------

def _round(value: Any) -> Any:
    """Round every float to the reporting precision, recursively"""
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, dict):
        return {k: _round(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round(v) for v in value]
    if isinstance(value, np.ndarray):
        return _round(value.tolist())
    return value


def _basis_payload(result: DiscordResult) -> Optional[List]:
    if result.optimal_basis is None:
        return None
    angles = result.basis_angles()
    if angles is not None:
        return [{"theta": t, "phi": p} for t, p in angles]
    return [
        [[[float(z.real), float(z.imag)] for z in row] for row in u]
        for u in result.optimal_basis.local_unitaries()
    ]


def result_payload(result: DiscordResult) -> Dict[str, Any]:
    if result.sigma is not None:
        probabilities = {
            "orbit_probabilities": result.sigma.orbit_probabilities,
            "orbit_sizes": result.sigma.orbit_sizes.astype(int),
        }
    elif result.optimal_probabilities is not None:
        probabilities = result.optimal_probabilities
    else:
        probabilities = None
    payload = {
        "value": result.value,
        "method": result.method,
        "basis": _basis_payload(result),
        "probabilities": probabilities,
        "diagnostics": result.diagnostics,
    }
    if "warning" in result.diagnostics:
        payload["warning"] = result.diagnostics["warning"]
    return _round(payload)


# ---------------------------------------------------------------------------
# discord
# ---------------------------------------------------------------------------

def _from_classical(value: float, sigma: ClassicalState, method: str) -> DiscordResult:
    return DiscordResult(
        value=value,
        affinity=1.0 - value,
        optimal_basis=sigma.basis,
        optimal_probabilities=sigma.probabilities,
        method=method,
    )


def _as_pure(state) -> PureState:
    if isinstance(state, PureState):
        return state
    if state.is_pure():
        w, v = state.spectrum
        return PureState.normalized(v[:, int(np.argmax(w))], state.dims)
    raise UsageError("pure-bipartite needs a pure state; the file holds a mixed density matrix")


def _as_density(state) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def bell_spectrum(state) -> Optional[np.ndarray]:
    """Bell-basis weights when a two-qubit state is Bell-diagonal"""
    if tuple(state.dims) != (2, 2):
        return None
    rho = _as_density(state).matrix
    s = 1 / np.sqrt(2)
    bells = np.column_stack([
        s * (catalogue.basis_ket("00") + catalogue.basis_ket("11")),
        s * (catalogue.basis_ket("00") - catalogue.basis_ket("11")),
        s * (catalogue.basis_ket("01") + catalogue.basis_ket("10")),
        s * (catalogue.basis_ket("01") - catalogue.basis_ket("10")),
    ])
    in_bell = bells.conj().T @ rho @ bells
    if np.abs(in_bell - np.diag(np.diag(in_bell))).max() > BELL_TOL:
        return None
    lam = np.clip(np.diag(in_bell).real, 0.0, None)
    return lam / lam.sum()


def _is_symmetric(state) -> bool:
    if len(state.dims) < 3 or any(d != 2 for d in state.dims):
        return False
    try:
        symmetric_from_state(state)
        return True
    except DiscordError:
        return False


def pick_method(state) -> str:
    """Most specific evaluator that applies to the state"""
    qubits = all(d == 2 for d in state.dims)
    if len(state.dims) == 2 and (isinstance(state, PureState) or state.is_pure()):
        return "pure-bipartite"
    if bell_spectrum(state) is not None:
        return "bell-diagonal"
    if _is_symmetric(state):
        return "symmetric"
    if qubits:
        return "optimize"
    raise UsageError(
        f"No evaluator handles a mixed state with dims {list(state.dims)}; "
        f"only qubit parties can be optimized"
    )


def evaluate(state, method: str, config: ResolvedConfig, grid_n: int = 13) -> DiscordResult:
    try:
        if method == "optimize":
            return dh_optimize(state, config.optimizer())
        if method == "bruteforce":
            value = dh_bruteforce(state, grid_n)
            return DiscordResult(value, 1.0 - value, None, None, "bruteforce", {"grid_n": grid_n})
        if method == "pure-bipartite":
            value, sigma = closed_forms.dh_pure_bipartite(_as_pure(state))
            return _from_classical(value, sigma, method)
        if method == "bell-diagonal":
            lam = bell_spectrum(state)
            if lam is None:
                raise UsageError("bell-diagonal needs a two-qubit state diagonal in the Bell basis")
            value, sigma = closed_forms.dh_bell_diagonal(closed_forms.BellDiagonalSpec.from_sequence(lam))
            return _from_classical(value, sigma, method)
        if method == "xstate":
            spec = closed_forms.XStateSpec.from_matrix(_as_density(state).matrix, state.dims)
            value, sigma = closed_forms.dh_xstate(spec)
            return _from_classical(value, sigma, method)
        if method == "symmetric":
            return dh_symmetric(symmetric_from_state(state), config.symmetric())
    except UnsupportedError as e:
        raise UsageError(f"Method '{method}' does not apply: {e}")
    except DomainError as e:
        if method in ("xstate", "pure-bipartite"):
            raise UsageError(f"Method '{method}' does not apply: {e}")
        raise
    raise UsageError(f"Unknown method '{method}'")


def cmd_discord(args, config: ResolvedConfig) -> int:
    method = args.method
    if method == "werner":
        if args.r is None:
            raise UsageError("werner needs --r")
        value = closed_forms.dh_werner_2qubit(args.r)
        result = _from_classical(value, closed_forms.dh_werner_2qubit_sigma(args.r), method)
    elif method == "bell-diagonal" and args.lambdas is not None:
        value, sigma = closed_forms.dh_bell_diagonal(closed_forms.BellDiagonalSpec.from_sequence(args.lambdas))
        result = _from_classical(value, sigma, method)
    else:
        if args.state_file is None:
            raise UsageError(f"Method '{method}' needs a state file")
        state = load_state(args.state_file)
        chosen = pick_method(state) if method == "auto" else method
        result = evaluate(state, chosen, config, args.grid_n)
        if method == "auto":
            cross_check(state, result, config)

    print(json.dumps(result_payload(result), indent=2))
    return 0


def cross_check(state, result: DiscordResult, config: ResolvedConfig):
    """Compare an auto-selected evaluator with the general optimizer on small qubit states"""
    if result.method == "optimize" or len(state.dims) > CROSS_CHECK_MAX_QUBITS:
        return
    if any(d != 2 for d in state.dims):
        return
    reference = dh_optimize(state, config.optimizer()).value
    deviation = abs(reference - result.value)
    result.diagnostics["cross_check"] = {"optimize": reference, "deviation": deviation}
    if deviation > CROSS_CHECK_TOL:
        message = f"{result.method} and optimize disagree by {deviation:.3e}"
        logger.warning(message)
        result.diagnostics["warning"] = message


# ---------------------------------------------------------------------------
# scan / verify
# ---------------------------------------------------------------------------

def _parse_fixed(pairs: List[str]) -> Dict[str, float]:
    fixed = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise UsageError(f"--set expects name=value, got '{pair}'")
        name, raw = pair.split("=", 1)
        try:
            fixed[name.strip()] = float(raw)
        except ValueError:
            raise UsageError(f"--set {name}: '{raw}' is not a number")
    return fixed


def cmd_scan(args, config: ResolvedConfig) -> int:
    spec = ScanSpec(
        model=args.model,
        start=args.start,
        stop=args.stop,
        points=args.points,
        param=args.param,
        fixed=_parse_fixed(args.set),
    )
    rows = run_scan(
        spec,
        scan=config.symmetric(),
        workers=config.workers,
        fock_cutoff=config.fock_cutoff,
        max_fock_cutoff=config.max_fock_cutoff,
    )
    text = rows_to_csv(rows)
    if args.output:
        output = Path(args.output)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text)
        logger.info(f"Wrote {len(rows)} rows to {output}")
    else:
        sys.stdout.write(text)
    return 1 if all(r.error for r in rows) else 0


def cmd_verify(args, config: ResolvedConfig) -> int:
    suites = SUITES if args.suite == "all" else (args.suite,)
    suite = VerifySuite(
        seed=config.seed,
        trials=args.trials,
        optimizer=config.optimizer(),
        symmetric=config.symmetric(),
    )
    passed = suite.run(suites)
    print(suite.generate_report())
    if args.save_results:
        suite.save_results()
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common_options(suppress: bool) -> argparse.ArgumentParser:
    """Settings accepted before or after the subcommand"""
    default = argparse.SUPPRESS if suppress else None
    common = argparse.ArgumentParser(add_help=False, argument_default=default)
    common.add_argument('--config', help='dotenv-format file with DISCORD_* settings')
    common.add_argument('--dump-config', action='store_true', default=argparse.SUPPRESS if suppress else False,
                        help='Print the resolved configuration as JSON and exit')
    common.add_argument('--workers', type=int, help='Worker threads (falls back to DISCORD_WORKERS)')
    common.add_argument('--seed', type=int, help='Seed for sampling and jitter')
    common.add_argument('--grid-points', type=int, help='Angle grid points per axis for the optimizer')
    common.add_argument('--restarts', type=int, help='Simplex refinements from the best grid cells')
    common.add_argument('--tolerance', type=float, help='Simplex function tolerance')
    common.add_argument('--max-grid-cells', type=int, help='Grid cells evaluated before sampling')
    common.add_argument('--theta-points', type=int, help='Symmetric scan theta points')
    common.add_argument('--phi-points', type=int, help='Symmetric scan phi points')
    common.add_argument('--fock-cutoff', type=int, help='Initial boson cutoff for the Dicke model')
    common.add_argument('--max-fock-cutoff', type=int, help='Largest boson cutoff tried')
    common.add_argument('--log-level', help='Logging level (default from LOG_LEVEL)')
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dh',
        description='Hellinger geometric discord of quantum states',
        parents=[_common_options(suppress=False)],
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    sub = parser.add_subparsers(dest='command')
    common = _common_options(suppress=True)

    discord = sub.add_parser('discord', parents=[common], help='D^H of a state file or a closed-form family')
    discord.add_argument('state_file', nargs='?', help='JSON state file')
    discord.add_argument('--method', choices=METHODS, default='auto')
    discord.add_argument('--r', type=float, help='Werner parameter for --method werner')
    discord.add_argument('--lambdas', type=float, nargs=4, metavar='L',
                         help='Bell-diagonal weights on Psi+, Psi-, Phi+, Phi-')
    discord.add_argument('--grid-n', type=int, default=13, help='Brute-force grid points per angle')

    scan = sub.add_parser('scan', parents=[common], help='D^H along a spin-model parameter sweep')
    scan.add_argument('model', choices=list(MODELS))
    scan.add_argument('--param', help='Swept parameter (model default if omitted)')
    scan.add_argument('--start', type=float, required=True)
    scan.add_argument('--stop', type=float, required=True)
    scan.add_argument('--points', type=int, default=40)
    scan.add_argument('--set', action='append', metavar='NAME=VALUE', help='Fix a model parameter')
    scan.add_argument('--output', help='CSV path (stdout if omitted)')

    verify = sub.add_parser('verify', parents=[common], help='Randomized cross-checks')
    verify.add_argument('suite', choices=list(SUITES) + ['all'])
    verify.add_argument('--trials', type=int, help='Random cases per suite')
    verify.add_argument('--save-results', action='store_true', help='Write a JSON results file to the log directory')
    return parser


OVERRIDE_FIELDS = (
    "workers", "seed", "grid_points", "restarts", "tolerance", "max_grid_cells",
    "theta_points", "phi_points", "fock_cutoff", "max_fock_cutoff",
)

COMMANDS = {
    "discord": cmd_discord,
    "scan": cmd_scan,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level or LOG_LEVEL)

    try:
        overrides = {name: getattr(args, name, None) for name in OVERRIDE_FIELDS}
        config = resolve_config(overrides, args.config)
        if args.dump_config:
            print(json.dumps(config.as_dict(), indent=2, sort_keys=True))
            return 0
        if args.command is None:
            parser.print_help(sys.stderr)
            return 2
        logger.info(f"Running {args.command} with {config.as_dict()}")
        return COMMANDS[args.command](args, config)
    except (UsageError, StateFileError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except DiscordError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
