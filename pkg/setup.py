import io
import os
import re
import subprocess

from setuptools import find_packages, setup

PACKAGE_NAME = "wittkit"
ROOTDIR = os.path.abspath(os.path.dirname(__file__))
VERSION_FILE = os.path.join(ROOTDIR, PACKAGE_NAME, "_version.py")


def _git(command):
    """Output of a git command, or None outside a repository."""
    try:
        return (
            subprocess.check_output(command, shell=True, stderr=subprocess.DEVNULL)
            .decode("utf-8")
            .strip(" \n")
        )
    except Exception:
        return None


def git_version():
    """Python standardised version (major.minor.patch.post<build>) from the last tag."""
    described = _git("git describe --tags")
    if described is None:
        return None
    match = re.match(r"v?(\d+\.\d+\.\d+(-\d+)?).*", described)
    if not match:
        raise RuntimeError("Failed to parse version string %s" % described)
    return match.group(1).replace("-", ".post")


def update_metadata(version_str, timestamp_str, sha1_str):
    """Write the version, commit timestamp and commit hash into _version.py"""
    with io.open(VERSION_FILE, "w", encoding="utf-8") as f:
        f.write("__version__ = '%s'\n" % version_str)
        f.write("__timestamp__ = '%s'\n" % timestamp_str)
        f.write("__sha1__ = '%s'\n" % sha1_str)


def get_requirements():
    """Non-empty, non-comment lines of requirements.txt"""
    with io.open(os.path.join(ROOTDIR, "requirements.txt"), encoding="utf-8") as f:
        lines = (l.split("#")[0].strip() for l in f.readlines())
        return [l for l in lines if l]


def get_version():
    """
    Version from git when available, else from an existing _version.py,
    else 'unknown'.
    """
    version = git_version()
    timestamp = _git("git log -1 --format=%cd")
    sha1 = _git("git rev-parse HEAD")
    if None not in (version, timestamp, sha1):
        update_metadata(version, timestamp, sha1)
        return version

    try:
        with io.open(VERSION_FILE, encoding="utf-8") as f:
            match = re.search(r"^__version__ = ['\"]([^'\"]*)['\"]", f.read(), re.M)
        if not match:
            raise ValueError("Stored version could not be parsed")
        return match.group(1)
    except (IOError, ValueError):
        update_metadata("unknown", "unknown", "unknown")
        return "unknown"


with open(os.path.join(ROOTDIR, "README.md"), "r") as fh:
    long_description = fh.read()

setup(
    name=PACKAGE_NAME,
    version=get_version(),
    description="Intersection homology, Witt spaces and resolutions of "
    "triangulated stratified pseudomanifolds",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests"]),
    python_requires=">=3.9",
    install_requires=get_requirements(),
    extras_require={"test": ["pytest", "jsonschema"]},
    entry_points={
        "console_scripts": [
            "wittkit = scripts.run_wittkit:main",
        ]
    },
    package_data={
        "wittkit": [
            "resources/complexes/*.json",
            "resources/schemas/*.json",
        ]
    },
)
