'''
Example argument defaults.

Copy to data/config.py to apply them to every command, or pass explicitly
with --config-file (--config for sortkd-train). Keys are argument names
with underscores. Explicit command line arguments still win.
'''

def set_args(args, script_name):
    args['show_time'] = False
    if script_name == 'sortkd-verify':
        args['cmax'] = 5
        args['random_cases'] = 1000
    if script_name == 'sortkd-train':
        # Noisy label grid, sort on and off.
        args['transforms'] = ['identity', 'sort']
        args['noise_ratios'] = [0.1, 0.2, 0.3]
