import multiprocessing as mp
import time as timer

import numpy as np
from tqdm import tqdm


def unit_seed(seed, index):
    """Seed of the index-th independent unit (fold, model) of a run seeded with seed."""
    return int(np.random.SeedSequence([int(seed), int(index)]).generate_state(1)[0])


def config_tqdm(range_inp, suppress_tqdm=False, **kwargs):
    if suppress_tqdm:
        return range_inp
    else:
        return tqdm(range_inp, **kwargs)


def run_jobs(
        func,
        input_dict_list,
        num_cpu=1,
        max_process_time=900,
        max_timeouts=4,
        suppress_print=True,
        ):
    """
    :param func:                top level (picklable) function called as func(**input_dict)
    :param input_dict_list:     list of keyword dictionaries, one per job
    :param num_cpu:             number of worker processes (int or 'max')
    :param max_process_time:    timeout in seconds for collecting a single job
    :param max_timeouts:        number of pool restarts before giving up
    :param suppress_print:      suppress the progress bar / timing lines
    :return:                    list of results, in the order of input_dict_list
    """

    num_cpu = 1 if num_cpu is None else num_cpu
    num_cpu = mp.cpu_count() if num_cpu == 'max' else num_cpu
    assert type(num_cpu) == int and num_cpu >= 1

    if num_cpu == 1 or len(input_dict_list) <= 1:
        # dont invoke multiprocessing if not necessary
        return [func(**input_dict) for input_dict in
                config_tqdm(input_dict_list, suppress_print, leave=False)]

    if suppress_print is False:
        start_time = timer.time()
        print("####### Running %i jobs on %i workers #######" % (len(input_dict_list), num_cpu))

    results = _try_multiprocess(func, input_dict_list, num_cpu, max_process_time, max_timeouts)
    if results is None:
        raise RuntimeError("Parallel jobs timed out %i times, giving up" % max_timeouts)

    if suppress_print is False:
        print("======= Jobs finished ======= | >>>> Time taken = %f " % (timer.time() - start_time))

    return results


def _try_multiprocess(func, input_dict_list, num_cpu, max_process_time, max_timeouts):

    # Base case
    if max_timeouts == 0:
        return None

    pool = mp.Pool(processes=num_cpu, maxtasksperchild=1)
    parallel_runs = [pool.apply_async(func, kwds=input_dict) for input_dict in input_dict_list]
    try:
        results = [p.get(timeout=max_process_time) for p in parallel_runs]
    except mp.TimeoutError:
        print("Timeout Error raised... Trying again")
        pool.close()
        pool.terminate()
        pool.join()
        return _try_multiprocess(func, input_dict_list, num_cpu, max_process_time, max_timeouts - 1)
    except Exception:
        # job failures are not timeouts: surface them to the caller
        pool.close()
        pool.terminate()
        pool.join()
        raise

    pool.close()
    pool.terminate()
    pool.join()
    return results
