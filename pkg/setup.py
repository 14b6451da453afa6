from setuptools import (
    setup,
    find_packages,
)

setup(
    name='aircon',
    license='MIT',
    version=open('VERSION').read().strip(),
    description=(
        "Monte-Carlo simulation of byzantine consensus over a wireless "
        "multiple-access channel."
    ),
    long_description="""\
AirCon runs a PBFT-style consensus where every user transmits the lattice
encoding of its block hash at the same time and the base station receives
their sum. Each user scores the broadcast aggregate against its own hash and
decides whether to continue, so a whole phase costs a single transmission
instead of one message per pair of users.

The package simulates the procedure end to end (AWGN, flat and EPA fading
channels, pilot-based channel estimation, malicious users) and measures how
often the outcome departs from the honest majority.
""",
    packages=find_packages(exclude=[
        'tests',
        'samples',
    ]),
    install_requires=[
        'colorama>=0.4',
        'numpy>=1.17',
        'scipy>=1.7',
        'PyYAML>=5.1',
        'tqdm>=4.40',
    ],
    entry_points={
        'console_scripts': [
            'aircon=aircon.cli:main',
        ],
    },
    test_suite='tests',
    python_requires='>=3.7',
    classifiers=[
        'Intended Audience :: Science/Research',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3 :: Only',
        'Topic :: Scientific/Engineering',
        'Topic :: System :: Distributed Computing',
        'License :: OSI Approved :: MIT License',
        'Development Status :: 3 - Alpha',
    ],
)
