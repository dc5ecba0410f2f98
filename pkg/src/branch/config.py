from direct.directnotify.DirectNotifyGlobal import directNotify
import panda3d.core as p3d

BRANCH_DEFAULTS = '''
default-directnotify-level warning
notify-level-GaloisField warning
notify-level-BranchEngine warning
notify-level-BranchCli warning
'''

exhaustive_limit = p3d.ConfigVariableInt(
    name='exhaustive-limit',
    default_value=1 << 28,
    description='Largest q^n searched by the exhaustive and code-distance oracles',
)

search_threads = p3d.ConfigVariableInt(
    name='search-threads',
    default_value=1,
    description='Number of shards searched concurrently by the branch engine',
)

search_backend = p3d.ConfigVariableString(
    name='search-backend',
    default_value='auto',
    description='Representative evaluator: scalar, vector, or auto',
)

vector_block_size = p3d.ConfigVariableInt(
    name='vector-block-size',
    default_value=1 << 16,
    description='Representatives evaluated per numpy block by the vector backend',
)

vector_threshold = p3d.ConfigVariableInt(
    name='vector-threshold',
    default_value=4096,
    description='The auto backend switches to vector once |S_r| exceeds this count',
)

vector_max_order = p3d.ConfigVariableInt(
    name='vector-max-order',
    default_value=1 << 16,
    description='Largest q given q x n scaling tables by the numpy evaluators and oracles',
)

class_filter = p3d.ConfigVariableBool(
    name='class-filter',
    default_value=True,
    description='Skip weight classes that can no longer lower the bound',
)

budget_weights = p3d.ConfigVariableBool(
    name='budget-weights',
    default_value=True,
    description='Abandon a weight count once it cannot lower the bound (scalar backend)',
)

involutory_fast_path = p3d.ConfigVariableBool(
    name='involutory-fast-path',
    default_value=True,
    description='Use a single product for involutory and Hadamard matrices',
)


def set_verbose(verbose: bool) -> None:
    level = 'info' if verbose else 'warning'
    p3d.load_prc_file_data(
        'Verbosity',
        '\n'.join(
            f'notify-level-{category} {level}'
            for category in ('GaloisField', 'BranchEngine', 'BranchCli')
        )
    )
    directNotify.setDconfigLevels()


def load() -> None:
    p3d.load_prc_file_data(
        'Branch Defaults',
        BRANCH_DEFAULTS
    )

    user_config_path = p3d.Filename.expand_from('$MAIN_DIR/config.prc')
    if user_config_path.exists():
        p3d.load_prc_file(user_config_path)

    directNotify.setDconfigLevels()
