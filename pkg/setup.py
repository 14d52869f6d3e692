#!/usr/bin/env python3
"""
Gravity Modes - Setup Script
============================

Checks system dependencies, creates the server virtual environment and runs
the test suite.

Usage:
    python setup.py --help
    python setup.py --dev          # Development setup
    python setup.py --check        # Check dependencies only
    python setup.py --test         # Run the fast tests
    python setup.py --test --slow  # Include the full-resolution checks
"""

import sys
import subprocess
import platform
import argparse
import shutil
from pathlib import Path

MIN_PYTHON = (3, 9)


class SetupManager:
    def __init__(self):
        self.system = platform.system().lower()
        self.project_root = Path(__file__).parent
        self.server_dir = self.project_root / "server"
        self.venv_path = self.server_dir / "venv"

    def log(self, message, level="INFO"):
        """Simple logging function"""
        colors = {
            "INFO": "\033[94m",  # Blue
            "SUCCESS": "\033[92m",  # Green
            "WARNING": "\033[93m",  # Yellow
            "ERROR": "\033[91m",  # Red
            "RESET": "\033[0m"  # Reset
        }
        color = colors.get(level, colors["INFO"])
        print(f"{color}[{level}]{colors['RESET']} {message}")

    def run_command(self, command, cwd=None, check=True):
        """Run shell command with error handling"""
        try:
            result = subprocess.run(
                command,
                shell=True,
                cwd=cwd or self.project_root,
                capture_output=True,
                text=True,
                check=check
            )
            return result
        except subprocess.CalledProcessError as e:
            self.log(f"Command failed: {command}", "ERROR")
            self.log(f"Error: {e.stderr or e.stdout}", "ERROR")
            return None

    @property
    def python_executable(self):
        if self.system == "windows":
            return self.venv_path / "Scripts" / "python.exe"
        return self.venv_path / "bin" / "python"

    def check_dependencies(self):
        """Check the interpreter version and the tools the setup relies on"""
        self.log("Checking system dependencies...")

        if sys.version_info < MIN_PYTHON:
            self.log(f"✗ python: {platform.python_version()} (need {'.'.join(map(str, MIN_PYTHON))}+)", "ERROR")
            return False
        self.log(f"✓ python: {platform.python_version()}", "SUCCESS")

        result = self.run_command("git --version", check=False)
        if result and result.returncode == 0:
            self.log(f"✓ git: {result.stdout.strip()}", "SUCCESS")
        else:
            self.log("git not found; only needed for development", "WARNING")
        return True

    def setup_python_environment(self):
        """Setup Python virtual environment and install dependencies"""
        self.log("Setting up Python environment...")

        if not self.venv_path.exists():
            self.log("Creating virtual environment...")
            result = self.run_command(f"{sys.executable} -m venv {self.venv_path}")
            if not result:
                return False
        else:
            self.log("Virtual environment already exists", "WARNING")

        self.log("Installing Python dependencies...")
        requirements_file = self.server_dir / "requirements.txt"
        if not requirements_file.exists():
            self.log("requirements.txt not found", "ERROR")
            return False
        result = self.run_command(f"{self.python_executable} -m pip install -r {requirements_file}")
        if result:
            self.log("Python dependencies installed successfully", "SUCCESS")
        return result is not None

    def setup_environment_file(self):
        """Create server/.env from the template"""
        self.log("Setting up environment configuration...")

        env_template = self.server_dir / ".env.template"
        env_file = self.server_dir / ".env"

        if env_template.exists() and not env_file.exists():
            shutil.copy(env_template, env_file)
            self.log("Created server/.env from template", "SUCCESS")
        elif env_file.exists():
            self.log("server/.env already exists", "WARNING")
        else:
            self.log("server/.env.template not found", "ERROR")
            return False
        return True

    def run_tests(self, slow=False):
        """Run pytest inside the server directory"""
        python = self.python_executable if self.python_executable.exists() else Path(sys.executable)
        marker = "" if slow else ' -m "not slow"'
        self.log(f"Running tests{' (including slow checks)' if slow else ''}...")
        result = self.run_command(f"{python} -m pytest -q{marker}", cwd=self.server_dir, check=False)
        if result is None:
            return False
        print(result.stdout)
        if result.returncode != 0:
            self.log("Tests failed", "ERROR")
            return False
        self.log("All tests passed", "SUCCESS")
        return True

    def development_setup(self):
        """Complete development environment setup"""
        self.log("=== Gravity Modes - Development Setup ===", "INFO")

        steps = [
            ("Check dependencies", self.check_dependencies),
            ("Setup Python environment", self.setup_python_environment),
            ("Setup environment file", self.setup_environment_file),
            ("Run fast tests", self.run_tests),
        ]

        for step_name, step_function in steps:
            self.log(f"Step: {step_name}")
            if not step_function():
                self.log(f"Setup failed at step: {step_name}", "ERROR")
                return False
            print()

        self.log("=== Setup completed successfully! ===", "SUCCESS")
        self.log("Next steps:", "INFO")
        self.log("1. Adjust server/.env if needed", "INFO")
        self.log("2. cd server && python -m app spectrum --nmax 6", "INFO")
        self.log("3. python -m app validate --out report.json", "INFO")
        return True


def main():
    parser = argparse.ArgumentParser(description="Gravity Modes Setup")
    parser.add_argument("--dev", action="store_true", help="Setup development environment")
    parser.add_argument("--check", action="store_true", help="Check dependencies only")
    parser.add_argument("--test", action="store_true", help="Run the test suite")
    parser.add_argument("--slow", action="store_true", help="Include slow tests with --test")

    args = parser.parse_args()

    setup = SetupManager()

    if args.check:
        ok = setup.check_dependencies()
    elif args.dev:
        ok = setup.development_setup()
    elif args.test:
        ok = setup.run_tests(slow=args.slow)
    else:
        parser.print_help()
        ok = True
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
