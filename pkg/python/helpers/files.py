from fnmatch import fnmatch
import os
import tempfile


def read_file(relative_path: str, encoding: str = "utf-8") -> str:
    with open(get_abs_path(relative_path), "r", encoding=encoding) as f:
        return f.read()


def write_file_atomic(relative_path: str, content: str, encoding: str = "utf-8"):
    """Write through a temporary sibling and rename, so readers never see a partial file."""
    abs_path = get_abs_path(relative_path)
    directory = os.path.dirname(abs_path)
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding=encoding) as f:
            f.write(content)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, abs_path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def delete_file(relative_path: str):
    abs_path = get_abs_path(relative_path)
    if os.path.exists(abs_path):
        os.remove(abs_path)


def list_files(relative_path: str, filter: str = "*"):
    abs_path = get_abs_path(relative_path)
    if not os.path.exists(abs_path):
        return []
    return sorted(file for file in os.listdir(abs_path) if fnmatch(file, filter))


def get_abs_path(*relative_paths):
    # absolute components win, as with os.path.join
    return os.path.join(get_base_dir(), *relative_paths)


def get_base_dir():
    base_dir = os.path.dirname(os.path.abspath(os.path.join(__file__, "../../")))
    return base_dir
