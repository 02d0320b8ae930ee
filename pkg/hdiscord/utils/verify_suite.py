"""
Randomized cross-checks of the closed forms, the general optimizer and the
symmetric ansatz, reported in the style of the project test runner.
"""

import json
import logging
from dataclasses import replace
from datetime import datetime
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np

from hdiscord.config import LOG_DIR, OptimizerConfig, SymmetricScanConfig
from hdiscord.core import catalogue
from hdiscord.core.states import ProductBasis
from hdiscord.processors import closed_forms
from hdiscord.processors.engine import dh_bruteforce, dh_fixed_basis, dh_optimize
from hdiscord.processors.symmetric import dh_symmetric, dicke_state, expand_symmetric, symmetric_from_state
from hdiscord.utils.worker_pool import map_ordered

logger = logging.getLogger(__name__)

SUITES = ("conjecture1", "conjecture2", "conjecture3", "multilevel")
THRESHOLD = 1e-4

STATUS_ICONS = {
    'PASS': '✅',
    'FAIL': '❌',
    'ERROR': '🔥',
}


class VerifySuite:
    """Runs one or more verification suites and collects per-check results"""

    def __init__(self, seed: int = 0, trials: Optional[int] = None,
                 optimizer: Optional[OptimizerConfig] = None,
                 symmetric: Optional[SymmetricScanConfig] = None):
        self.seed = seed
        self.trials = trials
        base = optimizer or OptimizerConfig()
        # Trials fan out over the pool; each optimization runs its restarts inline
        self.workers = base.workers
        self.optimizer = replace(base, workers=1)
        self.symmetric = symmetric or SymmetricScanConfig()
        self.test_results: List[Dict] = []

    # -- bookkeeping ------------------------------------------------------

    def _record(self, suite: str, test: str, deviations: List[float], threshold: float = THRESHOLD):
        worst = float(max(deviations)) if deviations else 0.0
        status = 'PASS' if worst <= threshold else 'FAIL'
        self.test_results.append({
            'suite': suite,
            'test': test,
            'status': status,
            'deviation': worst,
            'message': f"max deviation {worst:.3e} over {len(deviations)} cases (limit {threshold:.0e})",
        })
        log = logger.info if status == 'PASS' else logger.error
        log(f"{STATUS_ICONS[status]} {suite}/{test}: max deviation {worst:.3e}")

    def _check(self, suite: str, test: str, jobs: List, func: Callable, threshold: float = THRESHOLD):
        """Evaluate func on every job; any exception turns the check into an ERROR"""
        try:
            outcomes = map_ordered(func, jobs, workers=self.workers)
            errors = [e for _, e in outcomes if e is not None]
            if errors:
                raise errors[0]
            self._record(suite, test, [v for v, _ in outcomes], threshold)
        except Exception as e:
            logger.error(f"🔥 {suite}/{test} failed: {e}")
            self.test_results.append({
                'suite': suite,
                'test': test,
                'status': 'ERROR',
                'deviation': None,
                'message': str(e),
            })

    def _trials(self, default: int) -> int:
        return self.trials if self.trials is not None else default

    # -- suites -----------------------------------------------------------

    def run(self, suites=SUITES) -> bool:
        logger.info("=" * 60)
        logger.info("D^H VERIFICATION SUITE")
        logger.info("=" * 60)
        for name in suites:
            getattr(self, f"run_{name}")()
        return self.passed()

    def run_conjecture1(self):
        """Pure bipartite closed form against optimization"""
        rng = np.random.default_rng(self.seed)
        shapes = [(2, 2), (2, 3), (3, 3)]
        states = [catalogue.random_pure_state(shapes[i % 3], rng) for i in range(self._trials(50))]
        qubit_states = [s for s in states if s.dims == (2, 2)]

        def against_optimizer(psi):
            return abs(closed_forms.dh_pure_bipartite(psi)[0] - dh_optimize(psi, self.optimizer).value)

        def against_schmidt_basis(psi):
            value, sigma = closed_forms.dh_pure_bipartite(psi)
            return abs(value - dh_fixed_basis(psi, sigma.basis))

        self._check("conjecture1", "random 2x2 vs optimizer", qubit_states, against_optimizer)
        self._check("conjecture1", "Schmidt basis identity", states, against_schmidt_basis, 1e-10)

        worked = catalogue.worked_example_state()

        def worked_example(method):
            return abs(method(worked) - (1 - np.sqrt(7 / 8)))

        self._check("conjecture1", "worked example", [
            lambda s: closed_forms.dh_pure_bipartite(s)[0],
            lambda s: dh_optimize(s, self.optimizer).value,
            lambda s: dh_bruteforce(s, 13),
        ], worked_example, 1e-5)

    def run_conjecture2(self):
        """Werner and Bell-diagonal closed forms against optimization"""
        def werner(r):
            return abs(closed_forms.dh_werner_2qubit(r)
                       - dh_optimize(catalogue.werner_2qubit(r), self.optimizer).value)

        self._check("conjecture2", "Werner r sweep", [0.1, 0.3, 0.5, 0.7, 0.9], werner)

        rng = np.random.default_rng(self.seed + 1)
        spectra = [rng.dirichlet(np.ones(4)) for _ in range(self._trials(50))]

        def bell(lam):
            spec = closed_forms.BellDiagonalSpec.from_sequence(lam)
            return abs(closed_forms.dh_bell_diagonal(spec)[0] - dh_optimize(spec.density(), self.optimizer).value)

        self._check("conjecture2", "random Bell-diagonal vs optimizer", spectra, bell)

        def werner_as_bell(r):
            x = (1 - r) / 4
            spec = closed_forms.BellDiagonalSpec(x, x, x + r, x)
            return abs(closed_forms.dh_bell_diagonal(spec)[0] - closed_forms.dh_werner_2qubit(r))

        self._check("conjecture2", "Werner as Bell-diagonal", list(np.linspace(0, 1, 11)), werner_as_bell, 1e-12)

    def run_conjecture3(self):
        """Symmetric ansatz against the general optimizer and the known anchors"""
        ghz, w = catalogue.ghz_state(3), catalogue.w_state(3)
        dicke = dicke_state(4, 2)
        cases = [
            (symmetric_from_state(ghz), ghz),
            (symmetric_from_state(w), w),
            (dicke, expand_symmetric(dicke)),
        ]

        def symmetric_vs_general(pair):
            sym, full = pair
            return abs(dh_symmetric(sym, self.symmetric).value - dh_optimize(full, self.optimizer).value)

        self._check("conjecture3", "symmetric vs optimizer", cases, symmetric_vs_general, 1e-5)

        anchors = [
            (catalogue.ghz1_state(), 1 - 1 / np.sqrt(2)),
            (catalogue.w2_state(), 0.5),
        ]
        self._check(
            "conjecture3", "cyclic anchors", anchors,
            lambda item: abs(dh_optimize(item[0], self.optimizer).value - item[1]),
        )

    def run_multilevel(self):
        """Multilevel closed forms against the fixed-basis evaluator at the computational basis"""
        def werner_point(job):
            m, x = job
            rho = catalogue.werner_mlevel(m, x)
            return abs(closed_forms.dh_werner_mlevel(m, x) - dh_fixed_basis(rho, ProductBasis.computational((m, m))))

        def isotropic_point(job):
            m, x = job
            rho = catalogue.isotropic_mlevel(m, x)
            return abs(closed_forms.dh_isotropic_mlevel(m, x) - dh_fixed_basis(rho, ProductBasis.computational((m, m))))

        def prior_relation(job):
            m, x = job
            prior = closed_forms.prior_dh_isotropic_mlevel(m, x)
            return abs(closed_forms.from_prior(prior) - closed_forms.dh_isotropic_mlevel(m, x))

        werner_jobs = [(m, float(x)) for m in (2, 3) for x in np.linspace(-1, 1, 10)]
        iso_jobs = [(m, float(x)) for m in (2, 3) for x in np.linspace(0, 1, 10)]
        self._check("multilevel", "Werner formula identity", werner_jobs, werner_point, 1e-10)
        self._check("multilevel", "isotropic formula identity", iso_jobs, isotropic_point, 1e-10)
        self._check("multilevel", "prior measure relation", iso_jobs, prior_relation, 1e-10)

        def qubit_werner(x):
            return abs(closed_forms.dh_werner_mlevel(2, x)
                       - dh_optimize(catalogue.werner_mlevel(2, x), self.optimizer).value)

        self._check("multilevel", "m=2 Werner vs optimizer", [-0.8, -0.3, 0.2, 0.7], qubit_werner)

    # -- reporting --------------------------------------------------------

    def passed(self) -> bool:
        return bool(self.test_results) and all(r['status'] == 'PASS' for r in self.test_results)

    def summary(self) -> Dict[str, int]:
        return {
            'total': len(self.test_results),
            'passed': sum(1 for r in self.test_results if r['status'] == 'PASS'),
            'failed': sum(1 for r in self.test_results if r['status'] == 'FAIL'),
            'errors': sum(1 for r in self.test_results if r['status'] == 'ERROR'),
        }

    def generate_report(self) -> str:
        """Plain-text report; deterministic for a fixed seed"""
        counts = self.summary()
        lines = ["=" * 60, "VERIFICATION SUMMARY", "=" * 60]
        for suite in dict.fromkeys(r['suite'] for r in self.test_results):
            devs = [r['deviation'] for r in self.test_results
                    if r['suite'] == suite and r['deviation'] is not None]
            worst = f"{max(devs):.3e}" if devs else "n/a"
            lines.append(f"{suite}: max deviation {worst}")
        lines.append("")
        for r in self.test_results:
            icon = STATUS_ICONS.get(r['status'], '❓')
            lines.append(f"{icon} {r['suite']}/{r['test']}: {r['message']}")
        lines.append("")
        lines.append(
            f"Total: {counts['total']}  ✅ Passed: {counts['passed']}  "
            f"❌ Failed: {counts['failed']}  🔥 Errors: {counts['errors']}"
        )
        return "\n".join(lines)

    def save_results(self, directory: Path = LOG_DIR) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        results_file = directory / f"verify_results_{datetime.now().strftime('%Y%m%d_%H%M%S')}.json"
        with open(results_file, 'w') as f:
            json.dump({
                'timestamp': datetime.now().isoformat(),
                'seed': self.seed,
                'summary': self.summary(),
                'results': self.test_results,
            }, f, indent=2)
        logger.info(f"Results saved to: {results_file}")
        return results_file
