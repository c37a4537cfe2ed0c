from certifier import CertifierConfig
from python.helpers import runtime, settings


def initialize() -> CertifierConfig:

    current_settings = settings.get_settings()

    # certifier configuration from user settings
    config = CertifierConfig(
        level=current_settings["level"],
        precision=current_settings["precision"],
        degree_cap=current_settings["degree_cap"],
        witnesses=current_settings["witnesses"],
        output_format=current_settings["output_format"],
        cache_dir=current_settings["cache_dir"],
        jobs=current_settings["jobs"],
        koszul_level=current_settings["koszul_level"],
        koszul_max_level=current_settings["koszul_max_level"],
        verify_fraction=current_settings["verify_fraction"],
    )

    # environment beats the settings file
    config.jobs = runtime.get_jobs()
    config.cache_dir = runtime.get_cache_dir()

    # update config with runtime args
    args_override(config)

    return config


def args_override(config: CertifierConfig):
    # update config with runtime args
    for key, value in runtime.args.items():
        if hasattr(config, key):
            # conversion based on type of config[key]
            if isinstance(getattr(config, key), bool):
                value = value if isinstance(value, bool) else str(value).lower().strip() == "true"
            elif isinstance(getattr(config, key), int):
                value = int(value)
            elif isinstance(getattr(config, key), float):
                value = float(value)
            elif isinstance(getattr(config, key), str):
                value = str(value)
            else:
                raise Exception(
                    f"Unsupported argument type of '{key}': {type(getattr(config, key))}"
                )

            setattr(config, key, value)
    # koszul --level and --max-level drive the koszul levels
    if runtime.get_arg("command") == "koszul":
        if runtime.has_arg("level"):
            config.koszul_level = int(runtime.get_arg("level"))
        if runtime.has_arg("max_level"):
            config.koszul_max_level = int(runtime.get_arg("max_level"))
