from setuptools import setup

setup(
    name='EM Sequence Toolkit',
    version="0.1.0",
    package_dir={'em_sequence_toolkit': 'em_sequence_toolkit'},
    packages=[
        'em_sequence_toolkit',
        'em_sequence_toolkit.evaluation',
        'em_sequence_toolkit.makedata',
        'em_sequence_toolkit.models',
        'em_sequence_toolkit.visualization',
    ],
    install_requires=[
        'numpy>=1.22',
        'pandas>=1.5',
        'scipy>=1.8',
        'python-dotenv>=0.13.0',
    ],
    entry_points={
        'console_scripts': ['emseq=em_sequence_toolkit.cli:main'],
    },
    long_description=open('README.md').read(),
    python_requires='>=3.10',
    license="BSD-2",
)
