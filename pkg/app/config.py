import os
from dataclasses import dataclass
from typing import Any, Optional

from dotenv import load_dotenv


class Config:
    def __init__(self):
        self.config = {}
        self._load_config()

    def _load_config(self):
        # Load from .env file
        load_dotenv()

        # Load all environment variables
        for key, value in os.environ.items():
            self.config[key.upper()] = value

        # Set default values for missing configurations
        self._set_defaults()

    def _set_defaults(self):
        defaults = {
            'LOG_LEVEL': 'INFO',
            'LOG_FORMAT': '%(asctime)s - %(levelname)s - %(message)s',
            'LOG_DIR': 'logs',
            'LOG_FILE': 'min_gradation.log',
            # Candidate execution
            'SOLVER_JOBS': '1',
            'INITIAL_BATCH_SIZE': '8',
            'MAX_BATCH_SIZE': '64',
            'BATCH_SIZE_FACTOR': '2.0',
            'RESTRICT_ANTIPODAL': 'True',
            'PRUNE': 'False',
            # Verification
            'ORACLE_DENOMINATOR': '840',
            'ORACLE_BUDGET': '100000000',
            'ORACLE_MAX_FREE': '4',
            'LEMMA_TRIALS': '100',
            'RANDOM_SEED': '0',
            # Output
            'OUTPUT_DIR': 'output',
            'OUTPUT_FILE_PREFIX': 'bench',
        }
        for key, value in defaults.items():
            if key not in self.config or self.config[key] == '':
                self.config[key] = value

    def get(self, key: str, default: Any = None) -> Any:
        return self.config.get(key.upper(), default)

    def get_int(self, key: str) -> int:
        return int(self.get(key))

    def get_bool(self, key: str) -> bool:
        return str(self.get(key, '')).strip().lower() in ('1', 'true', 'yes', 'on')

    def set(self, key: str, value: Any):
        self.config[key.upper()] = value

    def __getattr__(self, name: str) -> Any:
        return self.get(name.upper())

    def to_dict(self):
        return self.config.copy()


def get_config() -> Config:
    return Config()


MODES = ('auto', 'migg', 'rmigg')
FORMATS = ('json', 'text', 'dot')
GRAPH_FORMATS = ('auto', 'edge-list', 'dimacs', 'json')


@dataclass
class RunConfig:
    """Everything one CLI invocation needs, with Config filling the gaps."""

    command: str
    input_path: Optional[str] = None
    mode: str = 'auto'
    graph_format: str = 'auto'
    fixed_spec: Optional[str] = None
    all_solutions: bool = False
    prune: bool = False
    restrict_antipodal: bool = True
    oracle_denominator: int = 840
    oracle_budget: int = 100_000_000
    oracle_max_free: int = 4
    output_format: str = 'json'
    output_path: Optional[str] = None
    jobs: int = 1
    seed: int = 0
    trials: int = 100

    @classmethod
    def from_args(cls, args: Any, config: Config) -> "RunConfig":
        def pick(name: str, fallback: Any) -> Any:
            value = getattr(args, name, None)
            return fallback if value is None else value

        restrict = config.get_bool('RESTRICT_ANTIPODAL')
        if getattr(args, 'no_antipodal_restriction', False):
            restrict = False

        return cls(
            command=args.command,
            input_path=getattr(args, 'input', None),
            mode=pick('mode', 'auto'),
            graph_format=pick('graph_format', 'auto'),
            fixed_spec=getattr(args, 'fixed', None),
            all_solutions=bool(getattr(args, 'all_solutions', False)),
            prune=bool(getattr(args, 'prune', False)) or config.get_bool('PRUNE'),
            restrict_antipodal=restrict,
            oracle_denominator=pick('oracle', config.get_int('ORACLE_DENOMINATOR')),
            oracle_budget=config.get_int('ORACLE_BUDGET'),
            oracle_max_free=config.get_int('ORACLE_MAX_FREE'),
            output_format=pick('format', 'text' if args.command == 'bench' else 'json'),
            output_path=getattr(args, 'output', None),
            jobs=pick('jobs', config.get_int('SOLVER_JOBS')),
            seed=pick('seed', config.get_int('RANDOM_SEED')),
            trials=pick('trials', config.get_int('LEMMA_TRIALS')),
        )

    def resolve_mode(self, has_zero: bool, has_one: bool, has_fixed: bool) -> str:
        """
        Map the requested mode onto one of the four solver entry points.

        Returns one of 'migg', 'rmigg-both', 'rmigg-one', 'rmigg-none'.
        """
        if self.mode not in MODES:
            raise ValueError(f"Unknown mode: {self.mode}")
        if self.mode == 'migg' or (self.mode == 'auto' and not has_fixed):
            if has_fixed:
                raise ValueError("Mode migg does not accept prefixed tones")
            return 'migg'
        if not has_fixed:
            raise ValueError("Mode rmigg needs at least one prefixed tone")
        if has_zero and has_one:
            return 'rmigg-both'
        if has_zero or has_one:
            return 'rmigg-one'
        return 'rmigg-none'


# Example usage and debugging
if __name__ == "__main__":
    config = get_config()
    print("Current configuration:")
    for key in ('LOG_LEVEL', 'SOLVER_JOBS', 'ORACLE_DENOMINATOR', 'ORACLE_BUDGET', 'LEMMA_TRIALS'):
        print(f"{key}: {config.get(key)}")
