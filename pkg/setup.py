from setuptools import setup, find_packages

setup(
    name="irqsim",
    version="0.1.0",
    packages=find_packages(include=["irqsim", "irqsim.*"]),
    install_requires=[
        "pydantic>=2.5.2",
        "numpy>=1.24",
    ],
    extras_require={
        "test": [
            "hypothesis>=6.80",
        ],
    },
    description="Deterministic discrete-event simulator of interrupt latency and context-switch delay under direct and virtualized interrupt dispatch",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: System :: Operating System Kernels",
        "Topic :: Scientific/Engineering",
    ],
    keywords=["rtos", "interrupt-latency", "scheduling", "simulation", "discrete-event", "benchmark"],
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "irqsim=irqsim.cli:main",
        ],
    },
    package_data={
        "irqsim": ["presets/*.json"],
    },
    include_package_data=True,
)
