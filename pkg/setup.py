import os
import sys
from setuptools import setup, find_packages

print("Installing csfml. \n Package intended for use with the provided conda env. See setup/README.md for setup instructions.")

if sys.version_info.major != 3:
    print("This Python is only compatible with Python 3, but you are running "
          "Python {}. The installation will likely fail.".format(sys.version_info.major))


def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()


setup(
    name='csfml',
    version='1.0.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    description='Alzheimer stage classification from cerebrospinal fluid biomarkers',
    long_description=read('README.md'),
    python_requires='>=3.7',
    install_requires=[
        'numpy',
        'scipy',
        'pandas>=1.5',
        'matplotlib',
        'tabulate',
        'tqdm',
        'pyyaml',
    ],
    extras_require={
        'test': ['pytest'],
    },
    entry_points={
        'console_scripts': ['csfml=csfml.cli:main'],
    },
)
